/** CSV readers for the simulation bundle schemas (comma, dot decimal, LF). */

import { readFileSync } from "node:fs";

export class CsvError extends Error {}

export interface Table {
  /** column names from the header line */
  columns: [string, string];
  xs: number[];
  ys: number[];
}

function parseRows(path: string, text: string): { header: string; rows: number[][] } {
  const lines = text.split("\n");
  if (lines.length === 0 || lines[0].trim() === "") {
    throw new CsvError(`${path}: empty file`);
  }
  const header = lines[0].replace(/\r$/, "");
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i].replace(/\r$/, "");
    if (line === "") continue;
    const parts = line.split(",");
    if (parts.length !== 2) {
      throw new CsvError(`${path}:${i + 1}: expected two comma-separated fields, got '${line}'`);
    }
    const x = Number(parts[0]);
    const y = Number(parts[1]);
    if (!Number.isFinite(x) || !Number.isFinite(y)) {
      throw new CsvError(`${path}:${i + 1}: non-numeric field in '${line}'`);
    }
    rows.push([x, y]);
  }
  if (rows.length === 0) {
    throw new CsvError(`${path}: no data rows`);
  }
  return { header, rows };
}

/** Any two-column numeric series (curve files: 'x,density', 'lambda,nu', ...). */
export function readSeries(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch {
    throw new CsvError(`missing or unreadable CSV: ${path}`);
  }
  const { header, rows } = parseRows(path, text);
  const columns = header.split(",");
  if (columns.length !== 2) {
    throw new CsvError(`${path}:1: expected a two-column header, got '${header}'`);
  }
  return {
    columns: [columns[0], columns[1]],
    xs: rows.map((r) => r[0]),
    ys: rows.map((r) => r[1]),
  };
}

/** Histogram files must carry the bin_center,density schema. */
export function readHistogram(path: string): Table {
  const table = readSeries(path);
  if (table.columns[0] !== "bin_center" || table.columns[1] !== "density") {
    throw new CsvError(
      `${path}:1: expected header 'bin_center,density', got '${table.columns.join(",")}'`,
    );
  }
  if (table.xs.length >= 2) {
    const w = table.xs[1] - table.xs[0];
    for (let i = 1; i < table.xs.length; i++) {
      const d = table.xs[i] - table.xs[i - 1];
      if (Math.abs(d - w) > 1e-9 * Math.max(1, Math.abs(w))) {
        throw new CsvError(`${path}: bin centers are not uniformly spaced`);
      }
    }
  }
  return table;
}
