/**
 * CSV loading for the sweep tables.
 *
 * The tables are plain comma-separated files with a header row and
 * full-precision decimal values.  Raw tokens are kept alongside the parsed
 * numbers so plotted points can carry the exact CSV text (the renderer is a
 * pass-through; only axis transforms touch the numbers).
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export interface Table {
  path: string;
  columns: string[];
  raw: string[][];
  values: number[][];
}

export class CsvError extends Error {}

export function loadCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch {
    throw new CsvError(`cannot read CSV file: ${path}`);
  }
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new CsvError(`malformed CSV ${path}: ${parsed.errors[0].message}`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new CsvError(`empty CSV: ${path}`);
  }
  const columns = rows[0];
  const raw = rows.slice(1);
  if (raw.length === 0) {
    throw new CsvError(`empty CSV (header only): ${path}`);
  }
  for (const row of raw) {
    if (row.length !== columns.length) {
      throw new CsvError(`ragged row in ${path}: ${row.join(",")}`);
    }
  }
  const values = raw.map((row) => row.map(Number));
  return { path, columns, raw, values };
}

export interface Column {
  raw: string[];
  values: number[];
}

export function column(table: Table, name: string): Column {
  const i = table.columns.indexOf(name);
  if (i < 0) {
    throw new CsvError(`missing column '${name}' in ${table.path}`);
  }
  return {
    raw: table.raw.map((row) => row[i]),
    values: table.values.map((row) => row[i]),
  };
}
