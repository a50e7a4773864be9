/** Figure manifest schema and validation. */

import { existsSync, readFileSync } from "node:fs";
import { dirname, resolve } from "node:path";

export type StyleRole = "empirical-points" | "fit-line" | "reference-dashed" | "staircase";
export type AxisScale = "linear" | "log-y";

export interface SeriesEntry {
  csv: string;
  label: string;
  role: StyleRole;
}

export interface FigureManifest {
  figure: string;
  axis_scale: AxisScale;
  series: SeriesEntry[];
  /** directory the csv paths are relative to */
  baseDir: string;
}

export class ManifestError extends Error {}

const ROLES: StyleRole[] = ["empirical-points", "fit-line", "reference-dashed", "staircase"];
const SCALES: AxisScale[] = ["linear", "log-y"];

export function loadManifest(path: string): FigureManifest {
  if (!existsSync(path)) {
    throw new ManifestError(`manifest not found: ${path}`);
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    throw new ManifestError(`${path}: invalid JSON (${(err as Error).message})`);
  }
  const obj = parsed as Record<string, unknown>;
  if (typeof obj.figure !== "string" || obj.figure === "") {
    throw new ManifestError(`${path}: 'figure' must be a non-empty string`);
  }
  const scale = obj.axis_scale;
  if (typeof scale !== "string" || !SCALES.includes(scale as AxisScale)) {
    throw new ManifestError(`${path}: 'axis_scale' must be one of ${SCALES.join(", ")}`);
  }
  if (!Array.isArray(obj.series) || obj.series.length === 0) {
    throw new ManifestError(`${path}: 'series' must be a non-empty list`);
  }
  const series: SeriesEntry[] = [];
  for (const [i, raw] of obj.series.entries()) {
    const entry = raw as Record<string, unknown>;
    if (typeof entry.csv !== "string" || entry.csv === "") {
      throw new ManifestError(`${path}: series[${i}] is missing a 'csv' path`);
    }
    if (typeof entry.label !== "string" || entry.label === "") {
      throw new ManifestError(`${path}: series[${i}] is missing a 'label'`);
    }
    if (typeof entry.role !== "string" || !ROLES.includes(entry.role as StyleRole)) {
      throw new ManifestError(
        `${path}: series[${i}] role must be one of ${ROLES.join(", ")}`,
      );
    }
    series.push({ csv: entry.csv, label: entry.label, role: entry.role as StyleRole });
  }
  const baseDir = dirname(resolve(path));
  // every referenced CSV must exist before any rendering starts
  for (const entry of series) {
    const full = resolve(baseDir, entry.csv);
    if (!existsSync(full)) {
      throw new ManifestError(`referenced CSV does not exist: ${full}`);
    }
  }
  return {
    figure: obj.figure,
    axis_scale: scale as AxisScale,
    series,
    baseDir,
  };
}
