/**
 * Turn a figure recipe plus a CSV directory into one SVG file.
 *
 * Every plotted point is a circle carrying the exact CSV tokens in data-x /
 * data-y attributes, so the point set can be re-extracted from the figure
 * and compared against the table verbatim.  All inputs are validated before
 * anything is written; a failed render never leaves a file behind.
 */

import { mkdirSync, renameSync, rmSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";

import { column, loadCsv, type Column, type Table, CsvError } from "./csv.js";
import type { FigureRecipe, PanelSpec, SeriesSpec } from "./recipes.js";
import { RECIPES } from "./recipes.js";
import { axes, esc, makeScale, padDomain, svgDocument, type Scale } from "./svg.js";

const WIDTH = 640;
const PANEL_HEIGHT = 300;
const MARGIN = { left: 64, right: 16, top: 18, bottom: 44 };

interface SeriesData {
  spec: SeriesSpec;
  x: Column;
  y: Column;
}

function applyFilters(table: Table, spec: SeriesSpec): number[] {
  let keep = table.values.map((_, i) => i);
  for (const f of spec.filters ?? []) {
    const col = column(table, f.column);
    keep = keep.filter((i) => {
      const v = col.values[i];
      if (f.equals !== undefined && v !== f.equals) return false;
      if (f.lessThan !== undefined && !(v < f.lessThan)) return false;
      if (f.greaterThan !== undefined && !(v > f.greaterThan)) return false;
      return true;
    });
  }
  return keep;
}

function seriesData(table: Table, spec: SeriesSpec): SeriesData {
  const keep = applyFilters(table, spec);
  const xs = column(table, spec.x);
  const ys = column(table, spec.y);
  return {
    spec,
    x: { raw: keep.map((i) => xs.raw[i]), values: keep.map((i) => xs.values[i]) },
    y: { raw: keep.map((i) => ys.raw[i]), values: keep.map((i) => ys.values[i]) },
  };
}

function finiteExtent(values: number[], positiveOnly: boolean): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (positiveOnly && v <= 0) continue;
    lo = Math.min(lo, v);
    hi = Math.max(hi, v);
  }
  if (!(lo <= hi)) throw new CsvError("no finite data to plot");
  return [lo, hi];
}

function renderSeries(data: SeriesData, x: Scale, y: Scale): string {
  const { spec } = data;
  const pts: Array<[number, number, number]> = [];
  for (let i = 0; i < data.x.values.length; i++) {
    const vx = data.x.values[i];
    const vy = data.y.values[i];
    if (!Number.isFinite(vx) || !Number.isFinite(vy)) continue;
    if (x.kind === "log10" && vx <= 0) continue;
    if (y.kind === "log10" && vy <= 0) continue;
    pts.push([x.toPx(vx), y.toPx(vy), i]);
  }
  const parts: string[] = [];
  parts.push(`<g class="series" data-label="${esc(spec.label)}">\n`);
  if (spec.mark !== "points" && pts.length > 1) {
    const path = pts.map(([px, py]) => `${px.toFixed(2)},${py.toFixed(2)}`).join(" ");
    const dash = spec.dash ? ` stroke-dasharray="${spec.dash}"` : "";
    parts.push(
      `<polyline points="${path}" fill="none" stroke="${spec.color}"${dash}/>\n`,
    );
  }
  if (spec.mark !== "line") {
    for (const [px, py, i] of pts) {
      parts.push(
        `<circle cx="${px.toFixed(2)}" cy="${py.toFixed(2)}" r="3"` +
        ` fill="${spec.color}" data-x="${esc(data.x.raw[i])}"` +
        ` data-y="${esc(data.y.raw[i])}"/>\n`,
      );
    }
  }
  if (spec.markMax && pts.length > 0) {
    let best = 0;
    for (let i = 1; i < data.y.values.length; i++) {
      if (data.y.values[i] > data.y.values[best]) best = i;
    }
    const px = x.toPx(data.x.values[best]);
    const py = y.toPx(data.y.values[best]);
    parts.push(
      `<circle cx="${px.toFixed(2)}" cy="${py.toFixed(2)}" r="4" fill="none"` +
      ` stroke="${spec.color}" stroke-width="1.5" class="max-marker"` +
      ` data-x="${esc(data.x.raw[best])}" data-y="${esc(data.y.raw[best])}"/>\n`,
    );
  }
  parts.push(`</g>\n`);
  return parts.join("");
}

function renderGuides(
  panel: PanelSpec,
  series: SeriesData[],
  x: Scale,
  y: Scale,
  box: { left: number; right: number },
): string {
  const parts: string[] = [];
  for (const guide of panel.guides ?? []) {
    const anchor = series.find((s) => s.spec.label === guide.anchorSeries);
    if (!anchor || anchor.x.values.length === 0) continue;
    // line of fixed log-log slope through the anchor series' first point
    const x0 = anchor.x.values[0];
    const y0 = anchor.y.values[0];
    const [xa, xb] = x.domain;
    const ya = y0 * Math.pow(xa / x0, guide.slope);
    const yb = y0 * Math.pow(xb / x0, guide.slope);
    const dash = guide.dash ? ` stroke-dasharray="${guide.dash}"` : "";
    parts.push(
      `<line class="guide" data-slope="${guide.slope}"` +
      ` x1="${x.toPx(xa).toFixed(2)}" y1="${y.toPx(ya).toFixed(2)}"` +
      ` x2="${x.toPx(xb).toFixed(2)}" y2="${y.toPx(yb).toFixed(2)}"` +
      ` stroke="${guide.color}" opacity="0.55"${dash}/>\n`,
    );
  }
  return parts.join("");
}

export function renderToString(recipe: FigureRecipe, csvDir: string): string {
  const table = loadCsv(join(csvDir, recipe.csv));
  const height = MARGIN.top + recipe.panels.length * (PANEL_HEIGHT + MARGIN.bottom);
  const body: string[] = [];
  let top = MARGIN.top;
  for (const panel of recipe.panels) {
    const series = panel.series.map((spec) => seriesData(table, spec));
    const box = {
      left: MARGIN.left,
      right: WIDTH - MARGIN.right,
      top,
      bottom: top + PANEL_HEIGHT,
    };
    const allX = series.flatMap((s) => s.x.values);
    const allY = series.flatMap((s) => s.y.values);
    const xDom = padDomain(recipe.xScale,
                           ...finiteExtent(allX, recipe.xScale === "log10"));
    const yDom = padDomain(panel.yScale,
                           ...finiteExtent(allY, panel.yScale === "log10"));
    const xScale = makeScale(recipe.xScale, xDom, [box.left, box.right]);
    const yScale = makeScale(panel.yScale, yDom, [box.bottom, box.top]);
    body.push(axes(xScale, yScale, box, recipe.xLabel, panel.yLabel));
    body.push(renderGuides(panel, series, xScale, yScale, box));
    for (const s of series) body.push(renderSeries(s, xScale, yScale));
    // legend
    let ly = box.top + 14;
    for (const s of series) {
      body.push(
        `<circle cx="${box.right - 150}" cy="${ly - 3}" r="3" fill="${s.spec.color}"/>` +
        `<text x="${box.right - 142}" y="${ly}">${esc(s.spec.label)}</text>\n`,
      );
      ly += 14;
    }
    top = box.bottom + MARGIN.bottom;
  }
  return svgDocument(WIDTH, height, body.join(""));
}

export function render(recipe: FigureRecipe, csvDir: string, outFile: string): void {
  const svg = renderToString(recipe, csvDir);   // validate + build first
  mkdirSync(dirname(outFile), { recursive: true });
  const tmp = `${outFile}.tmp`;
  writeFileSync(tmp, svg);
  try {
    renameSync(tmp, outFile);
  } catch (err) {
    rmSync(tmp, { force: true });
    throw err;
  }
}

export interface RenderReport {
  written: string[];
  skipped: Array<{ name: string; reason: string }>;
}

/** Render every recipe whose input CSV is present in csvDir. */
export function renderAll(csvDir: string, outDir: string): RenderReport {
  const report: RenderReport = { written: [], skipped: [] };
  for (const recipe of RECIPES) {
    const outFile = join(outDir, `${recipe.name}.svg`);
    try {
      render(recipe, csvDir, outFile);
      report.written.push(outFile);
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      if (reason.startsWith("cannot read CSV file")) {
        report.skipped.push({ name: recipe.name, reason });
      } else {
        throw err;
      }
    }
  }
  return report;
}
