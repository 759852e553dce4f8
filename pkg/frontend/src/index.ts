export { BENCH_COLUMNS, CsvSchemaError, parseBenchCsv } from "./csv.js";
export type { BenchColumn, BenchRow } from "./csv.js";
export { fitLogLogSlope, groupSeries, median, movingAverage } from "./series.js";
export type { MethodSeries, SeriesPoint } from "./series.js";
export { PRESETS, presetSpec } from "./plotspec.js";
export type { PlotSpec, PresetName } from "./plotspec.js";
export { render, renderSvg } from "./render.js";
export { makeScale, renderChart } from "./svg.js";
