import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { CsvError, readHistogram, readSeries } from "../src/csv.js";

function tempCsv(content: string): string {
  const dir = mkdtempSync(join(tmpdir(), "rmtlab-csv-"));
  const path = join(dir, "data.csv");
  writeFileSync(path, content, "utf-8");
  return path;
}

describe("readSeries", () => {
  it("parses a two-column file and keeps the header names", () => {
    const path = tempCsv("lambda,nu\n0.0,0.66\n0.5,0.7\n");
    const table = readSeries(path);
    expect(table.columns).toEqual(["lambda", "nu"]);
    expect(table.xs).toEqual([0.0, 0.5]);
    expect(table.ys).toEqual([0.66, 0.7]);
  });

  it("names the file when it is missing", () => {
    expect(() => readSeries("/nope/gone.csv")).toThrowError(/\/nope\/gone\.csv/);
  });

  it("reports the line number of a malformed row", () => {
    const path = tempCsv("x,density\n0.0,0.1\nbroken\n");
    expect(() => readSeries(path)).toThrowError(/:3:/);
  });

  it("rejects non-numeric fields", () => {
    const path = tempCsv("x,density\n0.0,abc\n");
    expect(() => readSeries(path)).toThrowError(CsvError);
  });

  it("rejects files with no data rows", () => {
    const path = tempCsv("x,density\n");
    expect(() => readSeries(path)).toThrowError(/no data rows/);
  });
});

describe("readHistogram", () => {
  it("requires the bin_center,density schema", () => {
    const path = tempCsv("x,density\n0.0,0.1\n");
    expect(() => readHistogram(path)).toThrowError(/bin_center,density/);
  });

  it("rejects non-uniform bin centers", () => {
    const path = tempCsv("bin_center,density\n0.0,0.1\n0.1,0.2\n0.35,0.1\n");
    expect(() => readHistogram(path)).toThrowError(/uniformly spaced/);
  });

  it("accepts a well-formed histogram", () => {
    const path = tempCsv("bin_center,density\n-0.05,0.3\n0.05,0.4\n0.15,0.3\n");
    const table = readHistogram(path);
    expect(table.xs.length).toBe(3);
  });
});
