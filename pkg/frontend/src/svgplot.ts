/** Minimal static SVG line plots; no DOM, no dependencies. */

export interface PlotOptions {
  title?: string;
  xlabel?: string;
  ylabel?: string;
  logY?: boolean;
  width?: number;
  height?: number;
  /** Overlay a fitted exponential A e^{-rate t}; the annotation text carries
   *  the rate verbatim. */
  fit?: { rate: number; amplitude: number; window: [number, number] };
}

const MARGIN = { left: 64, right: 16, top: 28, bottom: 42 };

function ticks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / n / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const first = Math.ceil(lo / s) * s;
  const out: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += s) out.push(v);
  return out;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(Math.round(v * 1e6) / 1e6);
}

export function linePlot(
  x: number[],
  ys: { name: string; values: number[] }[],
  opts: PlotOptions = {},
): string {
  const W = opts.width ?? 640;
  const H = opts.height ?? 360;
  const iw = W - MARGIN.left - MARGIN.right;
  const ih = H - MARGIN.top - MARGIN.bottom;
  const logY = opts.logY ?? false;

  const pts: { xs: number[]; ys: number[]; name: string }[] = [];
  let xmin = Infinity, xmax = -Infinity, ymin = Infinity, ymax = -Infinity;
  for (const { name, values } of ys) {
    const gx: number[] = [];
    const gy: number[] = [];
    for (let i = 0; i < x.length; i++) {
      const yv = values[i];
      if (!Number.isFinite(x[i]) || !Number.isFinite(yv)) continue;
      if (logY && yv <= 0) continue;
      gx.push(x[i]);
      gy.push(logY ? Math.log10(yv) : yv);
    }
    if (gx.length === 0) continue;
    xmin = Math.min(xmin, ...gx);
    xmax = Math.max(xmax, ...gx);
    ymin = Math.min(ymin, ...gy);
    ymax = Math.max(ymax, ...gy);
    pts.push({ xs: gx, ys: gy, name });
  }
  if (pts.length === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="80">` +
      `<text x="10" y="40" font-family="sans-serif" font-size="13">` +
      `${esc(opts.title ?? "plot")}: no finite data</text></svg>`;
  }
  if (xmax === xmin) { xmax = xmin + 1; }
  if (ymax === ymin) { ymax = ymin + 1; ymin -= 1; }
  const pad = 0.04 * (ymax - ymin);
  ymin -= pad; ymax += pad;

  const X = (v: number) => MARGIN.left + ((v - xmin) / (xmax - xmin)) * iw;
  const Y = (v: number) => MARGIN.top + (1 - (v - ymin) / (ymax - ymin)) * ih;

  const colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" font-family="sans-serif">`);
  parts.push(`<rect x="0" y="0" width="${W}" height="${H}" fill="white"/>`);
  if (opts.title) {
    parts.push(`<text x="${W / 2}" y="17" text-anchor="middle" font-size="14">${esc(opts.title)}</text>`);
  }
  // axes + ticks
  parts.push(`<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${iw}" height="${ih}" fill="none" stroke="#333"/>`);
  for (const tx of ticks(xmin, xmax)) {
    parts.push(`<line x1="${X(tx)}" y1="${MARGIN.top + ih}" x2="${X(tx)}" y2="${MARGIN.top + ih + 4}" stroke="#333"/>`);
    parts.push(`<text x="${X(tx)}" y="${MARGIN.top + ih + 17}" text-anchor="middle" font-size="11">${fmt(tx)}</text>`);
  }
  for (const ty of ticks(ymin, ymax)) {
    const label = logY ? `1e${fmt(ty)}` : fmt(ty);
    parts.push(`<line x1="${MARGIN.left - 4}" y1="${Y(ty)}" x2="${MARGIN.left}" y2="${Y(ty)}" stroke="#333"/>`);
    parts.push(`<text x="${MARGIN.left - 7}" y="${Y(ty) + 4}" text-anchor="end" font-size="11">${label}</text>`);
  }
  if (opts.xlabel) {
    parts.push(`<text x="${MARGIN.left + iw / 2}" y="${H - 8}" text-anchor="middle" font-size="12">${esc(opts.xlabel)}</text>`);
  }
  if (opts.ylabel) {
    parts.push(`<text x="15" y="${MARGIN.top + ih / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 15 ${MARGIN.top + ih / 2})">${esc(opts.ylabel)}</text>`);
  }
  // series
  pts.forEach((s, i) => {
    const d = s.xs.map((vx, k) => `${k ? "L" : "M"}${X(vx).toFixed(2)},${Y(s.ys[k]).toFixed(2)}`).join("");
    parts.push(`<path d="${d}" fill="none" stroke="${colors[i % colors.length]}" stroke-width="1.6"/>`);
    parts.push(`<text x="${MARGIN.left + iw - 6}" y="${MARGIN.top + 16 + 15 * i}" text-anchor="end" font-size="12" fill="${colors[i % colors.length]}">${esc(s.name)}</text>`);
  });
  // fitted-rate overlay (log scale): log10 y = log10 A - rate t / ln 10
  if (opts.fit && logY) {
    const { rate, amplitude, window } = opts.fit;
    const [a, b] = window;
    const ya = Math.log10(amplitude) - (rate * a) / Math.LN10;
    const yb = Math.log10(amplitude) - (rate * b) / Math.LN10;
    parts.push(`<line x1="${X(a)}" y1="${Y(ya)}" x2="${X(b)}" y2="${Y(yb)}" stroke="#000" stroke-dasharray="6 4" stroke-width="1.4"/>`);
    parts.push(`<text class="fit-rate" data-rate="${rate}" x="${X((a + b) / 2)}" y="${Y((ya + yb) / 2) - 8}" text-anchor="middle" font-size="12">rate = ${rate}</text>`);
  }
  parts.push("</svg>");
  return parts.join("\n");
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
