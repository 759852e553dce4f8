/**
 * Hand-rolled deterministic SVG output.
 *
 * No canvas layer exists in this runtime, and determinism is part of the
 * contract (same CSV in, byte-identical file out), so the chart is emitted
 * as plain SVG markup with fixed styling.  Structural attributes
 * (data-method, data-scale) exist so tests can assert on the chart's
 * composition without resorting to pixel checks.
 */
import type { MethodSeries, SeriesPoint } from "./series.js";

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 48, right: 160, bottom: 56, left: 76 };

/** Method colors, assigned to groups in sorted-method order. */
const PALETTE = [
  "#1f6fb2",
  "#d1495b",
  "#3e8e41",
  "#e09f3e",
  "#7b5ea7",
  "#00798c",
  "#9e4a3a",
  "#5d5d5d",
];

export interface Scale {
  (value: number): number;
  ticks: number[];
  kind: "linear" | "log";
}

function fmt(v: number): string {
  // Fixed-precision coordinates keep the output byte-stable.
  return v.toFixed(2).replace(/\.00$/, "");
}

/** Tick label without trailing float noise (1000 -> "1000", 0.125 -> "0.125"). */
function labelNumber(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e5 || Math.abs(v) < 1e-3)) {
    return v.toExponential(0).replace("+", "");
  }
  return String(Number(v.toPrecision(6)));
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  const first = Math.floor(Math.log10(lo));
  const last = Math.ceil(Math.log10(hi));
  const mantissas = last - first <= 3 ? [1, 2, 5] : [1];
  for (let e = first; e <= last; e++) {
    for (const m of mantissas) {
      const v = m * 10 ** e;
      if (v >= lo * 0.999 && v <= hi * 1.001) ticks.push(v);
    }
  }
  return ticks;
}

function linearTicks(lo: number, hi: number): number[] {
  const span = hi - lo || 1;
  const step = 10 ** Math.floor(Math.log10(span / 4));
  const scaled = span / 4 / step;
  const nice = scaled >= 5 ? 5 * step : scaled >= 2 ? 2 * step : step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / nice) * nice; v <= hi + nice * 1e-9; v += nice) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function makeScale(values: number[], range: [number, number], log: boolean): Scale {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (log) {
    const pad = 10 ** (0.04 * (Math.log10(hi / lo) || 1));
    lo /= pad;
    hi *= pad;
    const scale = (v: number) =>
      range[0] + ((Math.log10(v) - Math.log10(lo)) / (Math.log10(hi) - Math.log10(lo))) * (range[1] - range[0]);
    return Object.assign(scale, { ticks: logTicks(lo, hi), kind: "log" as const });
  }
  const pad = 0.05 * (hi - lo || Math.abs(hi) || 1);
  lo -= pad;
  hi += pad;
  const scale = (v: number) => range[0] + ((v - lo) / (hi - lo)) * (range[1] - range[0]);
  return Object.assign(scale, { ticks: linearTicks(lo, hi), kind: "linear" as const });
}

export interface ChartLabels {
  title: string;
  xLabel: string;
  yLabel: string;
}

export function renderChart(
  series: MethodSeries[],
  labels: ChartLabels,
  logX: boolean,
  logY: boolean,
): string {
  if (series.length === 0) {
    throw new Error("nothing to draw: every group was empty");
  }
  const xs = series.flatMap((s) => s.dots.map((p) => p.x));
  const ys = series.flatMap((s) => s.dots.map((p) => p.y));
  const xScale = makeScale(xs, [MARGIN.left, WIDTH - MARGIN.right], logX);
  const yScale = makeScale(ys, [HEIGHT - MARGIN.bottom, MARGIN.top], logY);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
      `font-family="Helvetica, Arial, sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${MARGIN.left}" y="28" font-size="15" font-weight="bold">${escapeXml(labels.title)}</text>`,
  );

  // Axes with ticks and grid lines.
  const plotBottom = HEIGHT - MARGIN.bottom;
  const plotRight = WIDTH - MARGIN.right;
  parts.push(`<g class="axis x" data-scale="${xScale.kind}">`);
  parts.push(line(MARGIN.left, plotBottom, plotRight, plotBottom, "#222", 1));
  for (const t of xScale.ticks) {
    const x = xScale(t);
    parts.push(line(x, plotBottom, x, plotBottom + 5, "#222", 1));
    parts.push(line(x, MARGIN.top, x, plotBottom, "#ddd", 0.5));
    parts.push(`<text x="${fmt(x)}" y="${plotBottom + 18}" text-anchor="middle">${labelNumber(t)}</text>`);
  }
  parts.push(
    `<text x="${fmt((MARGIN.left + plotRight) / 2)}" y="${HEIGHT - 12}" text-anchor="middle">${escapeXml(labels.xLabel)}</text>`,
  );
  parts.push(`</g>`);

  parts.push(`<g class="axis y" data-scale="${yScale.kind}">`);
  parts.push(line(MARGIN.left, MARGIN.top, MARGIN.left, plotBottom, "#222", 1));
  for (const t of yScale.ticks) {
    const y = yScale(t);
    parts.push(line(MARGIN.left - 5, y, MARGIN.left, y, "#222", 1));
    parts.push(line(MARGIN.left, y, plotRight, y, "#ddd", 0.5));
    parts.push(`<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" text-anchor="end">${labelNumber(t)}</text>`);
  }
  parts.push(
    `<text x="18" y="${fmt((MARGIN.top + plotBottom) / 2)}" text-anchor="middle" ` +
      `transform="rotate(-90 18 ${fmt((MARGIN.top + plotBottom) / 2)})">${escapeXml(labels.yLabel)}</text>`,
  );
  parts.push(`</g>`);

  // One dots group + one moving-average path per method.
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    parts.push(`<g class="dots" data-method="${escapeXml(s.method)}" fill="${color}" fill-opacity="0.45">`);
    for (const p of s.dots) {
      parts.push(`<circle cx="${fmt(xScale(p.x))}" cy="${fmt(yScale(p.y))}" r="2.5"/>`);
    }
    parts.push(`</g>`);
    parts.push(
      `<path class="ma" data-method="${escapeXml(s.method)}" fill="none" stroke="${color}" ` +
        `stroke-width="2" d="${pathD(s.line, xScale, yScale)}"/>`,
    );
  });

  // Legend, one row per method.
  parts.push(`<g class="legend">`);
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const y = MARGIN.top + 8 + i * 20;
    const x = WIDTH - MARGIN.right + 16;
    parts.push(`<rect x="${x}" y="${y - 9}" width="12" height="12" fill="${color}"/>`);
    parts.push(`<text x="${x + 18}" y="${y + 2}">${escapeXml(s.method)}</text>`);
  });
  parts.push(`</g>`);

  parts.push(`</svg>`);
  return parts.join("\n") + "\n";
}

function pathD(points: SeriesPoint[], xScale: Scale, yScale: Scale): string {
  return points
    .map((p, i) => `${i === 0 ? "M" : "L"}${fmt(xScale(p.x))} ${fmt(yScale(p.y))}`)
    .join(" ");
}

function line(x1: number, y1: number, x2: number, y2: number, stroke: string, width: number): string {
  return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"/>`;
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}
