/** Linear axis mapping with round tick positions. */

export interface Scale {
  domain: [number, number];
  range: [number, number];
  map(value: number): number;
  ticks(count?: number): number[];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  let [d0, d1] = domain;
  if (d0 === d1) {
    d0 -= 1;
    d1 += 1;
  }
  const [r0, r1] = range;
  const k = (r1 - r0) / (d1 - d0);
  return {
    domain: [d0, d1],
    range: [r0, r1],
    map: (v: number) => r0 + (v - d0) * k,
    ticks(count = 6): number[] {
      const span = d1 - d0;
      const step = niceStep(span / count);
      const start = Math.ceil(d0 / step) * step;
      const out: number[] = [];
      for (let v = start; v <= d1 + 1e-12 * span; v += step) {
        out.push(roundTick(v, step));
      }
      return out;
    },
  };
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(Math.abs(raw))));
  const frac = raw / mag;
  if (frac <= 1) return mag;
  if (frac <= 2) return 2 * mag;
  if (frac <= 5) return 5 * mag;
  return 10 * mag;
}

function roundTick(value: number, step: number): number {
  const digits = Math.max(0, -Math.floor(Math.log10(step)) + 1);
  return Number(value.toFixed(digits + 1));
}

export function dataExtent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    throw new Error("no finite values to scale");
  }
  return [lo, hi];
}

export function padExtent([lo, hi]: [number, number], frac = 0.05): [number, number] {
  const span = hi - lo || 1;
  return [lo - frac * span, hi + frac * span];
}
