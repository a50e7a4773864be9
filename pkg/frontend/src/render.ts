/** SVG rendering of a figure manifest: axes, styled series, legend. */

import { resolve } from "node:path";

import { readHistogram, readSeries, Table } from "./csv.js";
import { FigureManifest, SeriesEntry } from "./manifest.js";
import { dataExtent, linearScale, padExtent, Scale } from "./scale.js";

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { left: 64, right: 16, top: 20, bottom: 46 };

const DEFAULT_PALETTE = ["black", "red", "blue", "green", "magenta", "darkorange", "purple"];
// curve captions in the source material order blue/red/black per xi
const FIGURE_PALETTES: Record<string, string[]> = {
  fig8: ["blue", "red", "black"],
};

interface PreparedSeries {
  entry: SeriesEntry;
  table: Table;
  xs: number[];
  ys: number[];
  color: string;
  binWidth: number;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmt(v: number): string {
  return Number(v.toFixed(3)).toString();
}

function prepare(manifest: FigureManifest): PreparedSeries[] {
  const palette = FIGURE_PALETTES[manifest.figure] ?? DEFAULT_PALETTE;
  const logY = manifest.axis_scale === "log-y";
  const out: PreparedSeries[] = [];
  manifest.series.forEach((entry, index) => {
    const path = resolve(manifest.baseDir, entry.csv);
    const table =
      entry.role === "empirical-points" || entry.role === "staircase"
        ? readHistogram(path)
        : readSeries(path);
    let xs = table.xs;
    let ys = table.ys;
    if (logY) {
      const keptX: number[] = [];
      const keptY: number[] = [];
      for (let i = 0; i < ys.length; i++) {
        if (ys[i] > 0) {
          keptX.push(xs[i]);
          keptY.push(Math.log(ys[i]));
        }
      }
      xs = keptX;
      ys = keptY;
    }
    if (xs.length === 0) {
      throw new Error(`${path}: no plottable points (all densities vanish?)`);
    }
    const binWidth = table.xs.length >= 2 ? table.xs[1] - table.xs[0] : 0;
    out.push({
      entry,
      table,
      xs,
      ys,
      color: palette[index % palette.length],
      binWidth,
    });
  });
  return out;
}

function polylinePath(xs: number[], ys: number[], sx: Scale, sy: Scale): string {
  return xs
    .map((x, i) => `${i === 0 ? "M" : "L"}${fmt(sx.map(x))},${fmt(sy.map(ys[i]))}`)
    .join("");
}

function staircasePath(s: PreparedSeries, sx: Scale, sy: Scale): string {
  // histogram steps: horizontal segment across each bin at its density
  const half = s.binWidth / 2;
  let d = "";
  for (let i = 0; i < s.xs.length; i++) {
    const x0 = sx.map(s.xs[i] - half);
    const x1 = sx.map(s.xs[i] + half);
    const y = sy.map(s.ys[i]);
    d += `${i === 0 ? "M" : "L"}${fmt(x0)},${fmt(y)}L${fmt(x1)},${fmt(y)}`;
  }
  return d;
}

function seriesSvg(s: PreparedSeries, sx: Scale, sy: Scale): string {
  switch (s.entry.role) {
    case "empirical-points": {
      const dots = s.xs
        .map(
          (x, i) =>
            `<circle cx="${fmt(sx.map(x))}" cy="${fmt(sy.map(s.ys[i]))}" r="2.2" ` +
            `fill="none" stroke="${s.color}" stroke-width="1"/>`,
        )
        .join("");
      return `<g class="series points">${dots}</g>`;
    }
    case "fit-line":
      return (
        `<path class="series line" d="${polylinePath(s.xs, s.ys, sx, sy)}" ` +
        `fill="none" stroke="${s.color}" stroke-width="1.6"/>`
      );
    case "reference-dashed":
      return (
        `<path class="series dashed" d="${polylinePath(s.xs, s.ys, sx, sy)}" ` +
        `fill="none" stroke="${s.color}" stroke-width="1.4" stroke-dasharray="6 4"/>`
      );
    case "staircase":
      return (
        `<path class="series staircase" d="${staircasePath(s, sx, sy)}" ` +
        `fill="none" stroke="${s.color}" stroke-width="1.3"/>`
      );
  }
}

function axesSvg(sx: Scale, sy: Scale, xLabel: string, yLabel: string): string {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  let out = `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#444" stroke-width="1"/>`;
  for (const t of sx.ticks()) {
    const px = sx.map(t);
    if (px < x0 - 1e-6 || px > x1 + 1e-6) continue;
    out += `<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 5}" stroke="#444"/>`;
    out += `<text x="${fmt(px)}" y="${y0 + 18}" font-size="11" text-anchor="middle">${fmt(t)}</text>`;
  }
  for (const t of sy.ticks()) {
    const py = sy.map(t);
    if (py > y0 + 1e-6 || py < y1 - 1e-6) continue;
    out += `<line x1="${x0 - 5}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="#444"/>`;
    out += `<text x="${x0 - 8}" y="${fmt(py + 4)}" font-size="11" text-anchor="end">${fmt(t)}</text>`;
  }
  out += `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 10}" font-size="12" text-anchor="middle">${esc(xLabel)}</text>`;
  out += `<text x="16" y="${(y0 + y1) / 2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 ${(y0 + y1) / 2})">${esc(yLabel)}</text>`;
  return out;
}

function legendSvg(series: PreparedSeries[]): string {
  const x = WIDTH - MARGIN.right - 190;
  let out = "";
  series.forEach((s, i) => {
    const y = MARGIN.top + 16 + i * 16;
    const dash = s.entry.role === "reference-dashed" ? ' stroke-dasharray="6 4"' : "";
    if (s.entry.role === "empirical-points") {
      out += `<circle cx="${x + 12}" cy="${y - 4}" r="2.2" fill="none" stroke="${s.color}"/>`;
    } else {
      out += `<line x1="${x}" y1="${y - 4}" x2="${x + 24}" y2="${y - 4}" stroke="${s.color}" stroke-width="1.6"${dash}/>`;
    }
    out += `<text x="${x + 30}" y="${y}" font-size="11">${esc(s.entry.label)}</text>`;
  });
  return out;
}

export function renderManifest(manifest: FigureManifest): string {
  const series = prepare(manifest);
  const logY = manifest.axis_scale === "log-y";
  const allX = series.flatMap((s) => s.xs);
  const allY = series.flatMap((s) => s.ys);
  const sx = linearScale(padExtent(dataExtent(allX)), [MARGIN.left, WIDTH - MARGIN.right]);
  const sy = linearScale(padExtent(dataExtent(allY)), [HEIGHT - MARGIN.bottom, MARGIN.top]);
  const first = series[0].table.columns;
  const xLabel = first[0] === "bin_center" ? "x" : first[0];
  const yLabel = logY ? `ln ${first[1]}` : first[1];
  const body =
    axesSvg(sx, sy, xLabel, yLabel) +
    series.map((s) => seriesSvg(s, sx, sy)).join("") +
    legendSvg(series);
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">` +
    `<title>${esc(manifest.figure)}</title>` +
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>` +
    body +
    `</svg>\n`
  );
}
