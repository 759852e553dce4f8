/**
 * Turning trial rows into drawable series.
 *
 * A figure shows, per method: every trial as a dot, plus one line through
 * the moving average of the per-x medians ("sweep points").  On a log
 * y axis the window mean is geometric — a windowed arithmetic mean of a
 * power law would bow the line and bias its displayed slope, while the
 * geometric mean keeps an exact power law exactly straight.
 */
import type { BenchRow } from "./csv.js";

export interface SeriesPoint {
  x: number;
  y: number;
}

export interface MethodSeries {
  method: string;
  /** One point per trial row. */
  dots: SeriesPoint[];
  /** Moving average of the per-x medians, in x order. */
  line: SeriesPoint[];
}

export function median(values: number[]): number {
  if (values.length === 0) throw new Error("median of empty list");
  const s = [...values].sort((a, b) => a - b);
  const mid = s.length >> 1;
  return s.length % 2 === 1 ? s[mid]! : 0.5 * (s[mid - 1]! + s[mid]!);
}

/**
 * Centered moving average whose window shrinks symmetrically at the edges.
 *
 * Every output point is the mean of a window centered on it (an asymmetric
 * clamp would flatten the ends of a power-law line and bias its displayed
 * slope).  window=1 returns the input points unchanged, so the degenerate
 * line overlays the sweep medians exactly.  With `geometric`, the window
 * mean is taken in log space (all y must be positive, which the log-axis
 * filter upstream guarantees).
 */
export function movingAverage(points: SeriesPoint[], window: number, geometric: boolean): SeriesPoint[] {
  if (!Number.isInteger(window) || window < 1) {
    throw new Error(`moving-average window must be a positive integer, got ${window}`);
  }
  return points.map((p, i) => {
    const half = Math.min(Math.floor(window / 2), i, points.length - 1 - i);
    if (half === 0) return { x: p.x, y: p.y };
    const ys = points.slice(i - half, i + half + 1).map((q) => q.y);
    const y = geometric
      ? Math.exp(ys.reduce((acc, v) => acc + Math.log(v), 0) / ys.length)
      : ys.reduce((acc, v) => acc + v, 0) / ys.length;
    return { x: p.x, y };
  });
}

export interface GroupOptions {
  x: keyof BenchRow;
  y: keyof BenchRow;
  window: number;
  /** Geometric aggregation for log-scale y. */
  logY: boolean;
  /** Called once per skipped group with the reason. */
  warn?: (message: string) => void;
}

/**
 * Group rows by method and build dots + moving-average line per group.
 *
 * Rows whose x or y is missing or non-positive under a log scale are
 * dropped; a group that loses all its rows is skipped with a warning
 * rather than failing the whole figure.
 */
export function groupSeries(rows: BenchRow[], opts: GroupOptions): MethodSeries[] {
  const warn = opts.warn ?? ((m) => console.warn(m));
  const byMethod = new Map<string, BenchRow[]>();
  for (const row of rows) {
    const bucket = byMethod.get(row.method);
    if (bucket) bucket.push(row);
    else byMethod.set(row.method, [row]);
  }
  const out: MethodSeries[] = [];
  for (const method of [...byMethod.keys()].sort()) {
    const dots: SeriesPoint[] = [];
    for (const row of byMethod.get(method)!) {
      const x = row[opts.x];
      const y = row[opts.y];
      if (typeof x !== "number" || typeof y !== "number") continue;
      if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
      if (opts.logY && y <= 0) continue;
      dots.push({ x, y });
    }
    if (dots.length === 0) {
      warn(`group "${method}": no plottable rows for these axes; skipped`);
      continue;
    }
    const sweep = new Map<number, number[]>();
    for (const p of dots) {
      const bucket = sweep.get(p.x);
      if (bucket) bucket.push(p.y);
      else sweep.set(p.x, [p.y]);
    }
    const medians = [...sweep.keys()]
      .sort((a, b) => a - b)
      .map((x) => ({ x, y: median(sweep.get(x)!) }));
    out.push({ method, dots, line: movingAverage(medians, opts.window, opts.logY) });
  }
  return out;
}

/** Least-squares slope of log y against log x — the displayed log-log slope. */
export function fitLogLogSlope(points: SeriesPoint[]): number {
  if (points.length < 2) throw new Error("slope fit needs at least two points");
  const lx = points.map((p) => Math.log(p.x));
  const ly = points.map((p) => Math.log(p.y));
  const mx = lx.reduce((a, b) => a + b, 0) / lx.length;
  const my = ly.reduce((a, b) => a + b, 0) / ly.length;
  let num = 0;
  let den = 0;
  for (let i = 0; i < lx.length; i++) {
    num += (lx[i]! - mx) * (ly[i]! - my);
    den += (lx[i]! - mx) ** 2;
  }
  if (den === 0) throw new Error("slope fit needs at least two distinct x values");
  return num / den;
}
