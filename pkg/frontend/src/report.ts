/** Assemble the per-run report: plots + summary tables, HTML or markdown. */

import { RunView, Fit } from "./types.js";
import { esc, linePlot } from "./svgplot.js";

export interface RenderedReport {
  /** file name (without directory) -> contents */
  files: Map<string, string>;
  indexName: string;
}

function fitsOf(view: RunView): Fit[] {
  const out: Fit[] = [];
  for (const s of Object.values(view.summaries)) {
    if (Array.isArray(s.fits)) {
      for (const f of s.fits) {
        if (f && Number.isFinite(f.rate)) out.push(f as Fit);
      }
    }
  }
  return out;
}

export function buildPlots(view: RunView): Map<string, string> {
  const plots = new Map<string, string>();
  const s = view.series;
  if (!s || s.t.length === 0) return plots;
  const t = s.t;
  const deltaFit = fitsOf(view).find((f) => f.quantity === "delta");
  plots.set("delta_log", linePlot(t, [{ name: "delta", values: s.delta }], {
    title: "kinetic distance to the orbit (log scale)",
    xlabel: "t", ylabel: "delta", logY: true,
    fit: deltaFit ? { rate: deltaFit.rate, amplitude: deltaFit.amplitude,
                      window: deltaFit.window } : undefined,
  }));
  const m0 = s.mass[0];
  const e0 = s.energy[0];
  plots.set("conservation", linePlot(t, [
    { name: "mass drift", values: s.mass.map((v) => v - m0) },
    { name: "energy drift", values: s.energy.map((v) => v - e0) },
  ], { title: "conservation drift", xlabel: "t", ylabel: "drift" }));
  plots.set("kinetic_potential", linePlot(t, [
    { name: "kinetic", values: s.kinetic },
    { name: "potential", values: s.potential },
  ], { title: "kinetic / potential energy", xlabel: "t" }));
  if (s.alpha_plus.some((v) => Number.isFinite(v) && v !== 0)) {
    plots.set("projections", linePlot(t, [
      { name: "|alpha+|", values: s.alpha_plus.map(Math.abs) },
      { name: "|alpha-|", values: s.alpha_minus.map(Math.abs) },
    ], { title: "unstable-pair projections", xlabel: "t", logY: true }));
  }
  return plots;
}

function summaryTableHtml(view: RunView): string {
  const rows: string[] = [];
  for (const [name, s] of Object.entries(view.summaries)) {
    for (const [k, v] of Object.entries(s)) {
      if (k === "fits") continue;
      rows.push(`<tr><td>${esc(name)}</td><td>${esc(k)}</td><td><code>${esc(JSON.stringify(v))}</code></td></tr>`);
    }
  }
  return `<table><tr><th>source</th><th>key</th><th>value</th></tr>${rows.join("")}</table>`;
}

function fitsTableHtml(view: RunView): string {
  const fits = fitsOf(view);
  if (fits.length === 0) return "<p>(no fits)</p>";
  const rows = fits.map((f) =>
    `<tr><td>${esc(f.quantity)}</td><td>[${f.window[0]}, ${f.window[1]}]</td>` +
    `<td class="rate">${f.rate}</td><td>${f.amplitude}</td><td>${f.residual}</td></tr>`);
  return `<table><tr><th>quantity</th><th>window</th><th>rate</th>` +
    `<th>amplitude</th><th>residual</th></tr>${rows.join("")}</table>`;
}

export function renderRunHtml(view: RunView, title: string): string {
  const plots = buildPlots(view);
  const body: string[] = [];
  body.push(`<h2>${esc(title)}</h2>`);
  body.push(`<p>code version <code>${esc(view.manifest.code_version)}</code>, ` +
    `${view.manifest.files.length} artifacts, all hashes verified.</p>`);
  if (view.problems.length) {
    body.push(`<p class="warn">load warnings: ${esc(view.problems.join("; "))}</p>`);
  }
  body.push("<h3>fits</h3>", fitsTableHtml(view));
  for (const [name, svg] of plots) {
    body.push(`<div class="plot" id="${name}">${svg}</div>`);
  }
  if (!view.series || view.series.t.length === 0) {
    body.push("<p>(no time-series samples in this run)</p>");
  }
  body.push("<h3>summaries</h3>", summaryTableHtml(view));
  body.push(`<details><summary>config snapshot</summary><pre>${esc(view.manifest.config_snapshot)}</pre></details>`);
  return body.join("\n");
}

export function htmlDocument(sections: string[], title: string): string {
  return `<!DOCTYPE html>
<html><head><meta charset="utf-8"><title>${esc(title)}</title>
<style>
 body { font-family: sans-serif; margin: 2em auto; max-width: 900px; }
 table { border-collapse: collapse; margin: 0.6em 0; }
 td, th { border: 1px solid #bbb; padding: 3px 9px; font-size: 13px; }
 .plot { margin: 1em 0; }
 .warn { color: #b00; }
 code, pre { background: #f4f4f4; }
</style></head>
<body><h1>${esc(title)}</h1>
${sections.join("\n<hr>\n")}
</body></html>
`;
}

export function renderRunMarkdown(view: RunView, title: string): string {
  const lines: string[] = [`## ${title}`, ""];
  lines.push(`code version \`${view.manifest.code_version}\`, ` +
    `${view.manifest.files.length} artifacts, hashes verified.`, "");
  const fits = fitsOf(view);
  if (fits.length) {
    lines.push("| quantity | window | rate | amplitude | residual |");
    lines.push("|---|---|---|---|---|");
    for (const f of fits) {
      lines.push(`| ${f.quantity} | [${f.window[0]}, ${f.window[1]}] | ${f.rate} | ${f.amplitude} | ${f.residual} |`);
    }
    lines.push("");
  }
  for (const [name, s] of Object.entries(view.summaries)) {
    lines.push(`### ${name}`, "", "```json", JSON.stringify(s, null, 1), "```", "");
  }
  return lines.join("\n");
}
