/** Load and hash-verify a run directory against its manifest. */

import { createHash } from "node:crypto";
import { promises as fs } from "node:fs";
import path from "node:path";

import { CSV_COLUMNS, Manifest, RunView, SeriesTable, Summary } from "./types.js";

export async function sha256File(p: string): Promise<string> {
  const buf = await fs.readFile(p);
  return createHash("sha256").update(buf).digest("hex");
}

export function parseTimeseriesCsv(text: string): SeriesTable {
  const lines = text.split("\n").filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV: missing header");
  }
  const header = lines[0].split(",");
  const expected = CSV_COLUMNS.join(",");
  if (lines[0].trim() !== expected) {
    throw new Error(`unexpected CSV header: ${lines[0]}`);
  }
  const table: SeriesTable = {};
  for (const name of header) table[name] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`ragged CSV row: ${line}`);
    }
    cells.forEach((c, i) => table[header[i]].push(Number(c)));
  }
  return table;
}

/**
 * Read the manifest, verify every listed artifact's SHA-256, and parse the
 * time series plus every JSON summary.  Hash mismatches and missing files
 * are fatal; odd-but-loadable artifacts are reported in `problems`.
 */
export async function loadRun(dir: string): Promise<RunView> {
  const manifestPath = path.join(dir, "manifest.json");
  let manifest: Manifest;
  try {
    manifest = JSON.parse(await fs.readFile(manifestPath, "utf8"));
  } catch (err) {
    throw new Error(`cannot read manifest at ${manifestPath}: ${err}`);
  }
  const bad: string[] = [];
  for (const entry of manifest.files) {
    const p = path.join(dir, entry.path);
    try {
      const got = await sha256File(p);
      if (got !== entry.sha256) {
        bad.push(`${entry.path}: hash mismatch (manifest ${entry.sha256.slice(0, 12)}.., file ${got.slice(0, 12)}..)`);
      }
    } catch {
      bad.push(`${entry.path}: missing`);
    }
  }
  if (bad.length > 0) {
    throw new Error(`run integrity check failed:\n  ${bad.join("\n  ")}`);
  }

  const problems: string[] = [];
  let series: SeriesTable | null = null;
  const summaries: Record<string, Summary> = {};
  for (const entry of manifest.files) {
    const p = path.join(dir, entry.path);
    if (entry.path.endsWith(".csv") && path.basename(entry.path) === "timeseries.csv") {
      try {
        series = parseTimeseriesCsv(await fs.readFile(p, "utf8"));
      } catch (err) {
        problems.push(`${entry.path}: ${err}`);
      }
    } else if (entry.path.endsWith(".json")) {
      try {
        summaries[path.basename(entry.path)] = JSON.parse(await fs.readFile(p, "utf8"));
      } catch (err) {
        problems.push(`${entry.path}: ${err}`);
      }
    }
  }
  return { dir, manifest, series, summaries, problems };
}

/** Sweep layout: subdirectories that carry their own manifest. */
export async function findSubRuns(dir: string): Promise<string[]> {
  const out: string[] = [];
  for (const name of await fs.readdir(dir)) {
    const sub = path.join(dir, name);
    try {
      const st = await fs.stat(sub);
      if (st.isDirectory()) {
        await fs.access(path.join(sub, "manifest.json"));
        out.push(sub);
      }
    } catch {
      /* not a run directory */
    }
  }
  return out.sort();
}
