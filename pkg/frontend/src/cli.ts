#!/usr/bin/env node
/** nls-report <run-dir> [--out DIR] [--format html|md]
 *
 * Renders a static report for one nls-lab run directory, or one section per
 * sub-run for a sweep directory.  Inputs are never modified.
 */

import { promises as fs } from "node:fs";
import path from "node:path";
import { parseArgs } from "node:util";

import { findSubRuns, loadRun } from "./loader.js";
import { htmlDocument, renderRunHtml, renderRunMarkdown } from "./report.js";

export async function main(argv: string[]): Promise<number> {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        out: { type: "string" },
        format: { type: "string", default: "html" },
      },
    });
  } catch (err) {
    console.error(String(err));
    return 2;
  }
  const [runDir] = parsed.positionals;
  const format = parsed.values.format ?? "html";
  if (!runDir || (format !== "html" && format !== "md")) {
    console.error("usage: nls-report <run-dir> [--out DIR] [--format html|md]");
    return 2;
  }
  const outDir = parsed.values.out ?? path.join(runDir, "report");

  // a sweep directory has no manifest of its own sections' series; treat any
  // directory containing sub-manifests as a multi-section report
  let dirs: string[] = [];
  try {
    await fs.access(path.join(runDir, "manifest.json"));
    dirs = [runDir];
    const subs = await findSubRuns(runDir);
    dirs.push(...subs);
  } catch {
    dirs = await findSubRuns(runDir);
  }
  if (dirs.length === 0) {
    console.error(`no manifest.json under ${runDir}`);
    return 1;
  }

  const sections: string[] = [];
  for (const d of dirs) {
    const label = path.relative(path.dirname(runDir), d) || d;
    try {
      const view = await loadRun(d);
      sections.push(format === "html" ? renderRunHtml(view, label)
                                      : renderRunMarkdown(view, label));
    } catch (err) {
      console.error(`failed to load ${d}: ${err}`);
      return 1;
    }
  }

  await fs.mkdir(outDir, { recursive: true });
  const name = format === "html" ? "report.html" : "report.md";
  const body = format === "html"
    ? htmlDocument(sections, `nls-lab report: ${path.basename(runDir)}`)
    : `# nls-lab report: ${path.basename(runDir)}\n\n${sections.join("\n\n---\n\n")}\n`;
  await fs.writeFile(path.join(outDir, name), body);
  console.log(`wrote ${path.join(outDir, name)} (${dirs.length} section(s))`);
  return 0;
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("nls-report")) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
