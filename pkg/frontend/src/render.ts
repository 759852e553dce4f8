/**
 * File-to-file figure rendering: CSV in, SVG out.
 */
import { readFile, writeFile } from "node:fs/promises";

import { parseBenchCsv } from "./csv.js";
import type { PlotSpec } from "./plotspec.js";
import { groupSeries } from "./series.js";
import { renderChart } from "./svg.js";

const AXIS_LABELS: Record<string, string> = {
  d: "dimension d",
  n: "vectors n",
  tsc: "total entries read",
  rel_err: "relative spectral error",
};

/** Render a figure to an SVG string (pure given the CSV text). */
export function renderSvg(csvText: string, spec: PlotSpec, warn?: (m: string) => void): string {
  const rows = parseBenchCsv(csvText);
  const series = groupSeries(rows, {
    x: spec.x,
    y: spec.y,
    window: spec.window,
    logY: spec.logY,
    warn,
  });
  return renderChart(
    series,
    {
      title: spec.title,
      xLabel: AXIS_LABELS[spec.x] ?? spec.x,
      yLabel: AXIS_LABELS[spec.y] ?? spec.y,
    },
    spec.logX,
    spec.logY,
  );
}

/** Render spec.csv to spec.out; returns the SVG string it wrote. */
export async function render(spec: PlotSpec, warn?: (m: string) => void): Promise<string> {
  const text = await readFile(spec.csv, "utf8");
  const svg = renderSvg(text, spec, warn);
  await writeFile(spec.out, svg, "utf8");
  return svg;
}
