#!/usr/bin/env node
/** render_figures <csv_dir> <out_dir> - one SVG per recipe with inputs present. */

import { renderAll } from "./render.js";

function main(argv: string[]): number {
  if (argv.length !== 2) {
    process.stderr.write("usage: render_figures <csv_dir> <out_dir>\n");
    return 2;
  }
  const [csvDir, outDir] = argv;
  const report = renderAll(csvDir, outDir);
  for (const path of report.written) {
    process.stdout.write(`wrote ${path}\n`);
  }
  for (const skip of report.skipped) {
    process.stdout.write(`skipped ${skip.name}: ${skip.reason}\n`);
  }
  if (report.written.length === 0) {
    process.stderr.write(`no figure inputs found in ${csvDir}\n`);
    return 2;
  }
  return 0;
}

process.exit(main(process.argv.slice(2)));
