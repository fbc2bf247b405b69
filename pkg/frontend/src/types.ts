/** Shapes of the nls-lab run artifacts this tool consumes. */

export interface ManifestEntry {
  path: string;
  sha256: string;
}

export interface Manifest {
  config_snapshot: string;
  code_version: string;
  wall_clock: number;
  files: ManifestEntry[];
  verdicts: Record<string, unknown>;
}

export interface Fit {
  quantity: string;
  window: [number, number];
  rate: number;
  amplitude: number;
  residual: number;
}

export interface Summary {
  beta?: number;
  branch?: string;
  e0?: number | null;
  verdicts?: Record<string, unknown>;
  fits?: Fit[];
  [key: string]: unknown;
}

/** Parsed time-series table keyed by column name. */
export type SeriesTable = Record<string, number[]>;

export interface RunView {
  dir: string;
  manifest: Manifest;
  series: SeriesTable | null;       // timeseries.csv when present
  summaries: Record<string, Summary>; // every *.json artifact except manifest
  problems: string[];               // per-file load problems (fatal ones throw)
}

export const CSV_COLUMNS = [
  "t", "mass", "energy", "kinetic", "potential", "delta", "h1norm",
  "alpha", "theta0", "theta1", "alpha_plus", "alpha_minus", "verdict_flag",
] as const;
