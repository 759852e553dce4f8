/**
 * What to draw: axes, grouping, smoothing, and scales for one figure.
 */

export interface PlotSpec {
  /** Input CSV path. */
  csv: string;
  /** Axis columns; x is a sweep variable, y a measured quantity. */
  x: "d" | "n";
  y: "tsc" | "rel_err";
  /** Series grouping column (one scatter + one line per distinct value). */
  groupBy: "method";
  /** Moving-average window in sweep points. */
  window: number;
  logX: boolean;
  logY: boolean;
  /** Output SVG path. */
  out: string;
  title: string;
}

export type PresetName = "fig4a" | "fig4b" | "err-vs-n";

/** The two budget-vs-dimension panels plus the error-decay diagnostic. */
export const PRESETS: Record<PresetName, Omit<PlotSpec, "csv" | "out">> = {
  fig4a: {
    x: "d",
    y: "tsc",
    groupBy: "method",
    window: 5,
    logX: true,
    logY: true,
    title: "Total entries to target vs dimension (full-rank sweep)",
  },
  fig4b: {
    x: "d",
    y: "tsc",
    groupBy: "method",
    window: 5,
    logX: true,
    logY: true,
    title: "Total entries to target vs dimension (low-rank sweep)",
  },
  "err-vs-n": {
    x: "n",
    y: "rel_err",
    groupBy: "method",
    window: 5,
    logX: true,
    logY: true,
    title: "Relative error vs vector count",
  },
};

export function presetSpec(name: string, csv: string, out: string, window?: number): PlotSpec {
  const preset = PRESETS[name as PresetName];
  if (!preset) {
    throw new Error(`unknown preset "${name}"; expected one of: ${Object.keys(PRESETS).join(", ")}`);
  }
  return { ...preset, csv, out, ...(window === undefined ? {} : { window }) };
}
