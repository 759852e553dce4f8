/**
 * Benchmark CSV ingestion.
 *
 * The producer writes a fixed schema
 * `method,d,k,alpha,n,esc,tsc,rel_err,seed,wall_ms` with empty strings for
 * the optional k/alpha fields.  Seeds are 128-bit decimals, far past
 * Number.MAX_SAFE_INTEGER, so they stay strings here.
 */
import Papa from "papaparse";

export interface BenchRow {
  method: string;
  d: number;
  k: number | null;
  alpha: number | null;
  n: number;
  esc: number;
  tsc: number;
  rel_err: number;
  seed: string;
  wall_ms: number;
}

export const BENCH_COLUMNS = [
  "method",
  "d",
  "k",
  "alpha",
  "n",
  "esc",
  "tsc",
  "rel_err",
  "seed",
  "wall_ms",
] as const;

export type BenchColumn = (typeof BENCH_COLUMNS)[number];

/** Columns that can serve as a plot axis. */
export const NUMERIC_COLUMNS = ["d", "k", "alpha", "n", "esc", "tsc", "rel_err", "wall_ms"] as const;

export class CsvSchemaError extends Error {}

function requireNumber(raw: string | undefined, column: string, line: number): number {
  const value = Number(raw);
  if (raw === undefined || raw === "" || !Number.isFinite(value)) {
    throw new CsvSchemaError(`line ${line}: column "${column}" is not a number (got ${JSON.stringify(raw ?? "")})`);
  }
  return value;
}

function optionalNumber(raw: string | undefined, column: string, line: number): number | null {
  if (raw === undefined || raw === "") return null;
  return requireNumber(raw, column, line);
}

/**
 * Parse benchmark CSV text, validating the full schema.
 *
 * Throws CsvSchemaError naming the first missing column or the first
 * malformed cell (with its line number).  Extra columns are rejected too:
 * the schema is a closed contract between producer and renderer.
 */
export function parseBenchCsv(text: string): BenchRow[] {
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0]!;
    throw new CsvSchemaError(`row ${e.row ?? "?"}: ${e.message}`);
  }
  const header = (parsed.meta.fields ?? []).map((f) => f.trim());
  for (const column of BENCH_COLUMNS) {
    if (!header.includes(column)) {
      throw new CsvSchemaError(`missing column "${column}" (header has: ${header.join(", ")})`);
    }
  }
  for (const column of header) {
    if (!(BENCH_COLUMNS as readonly string[]).includes(column)) {
      throw new CsvSchemaError(`unknown column "${column}"`);
    }
  }
  return parsed.data.map((raw, i) => {
    const line = i + 2; // 1-based, after the header
    return {
      method: raw.method ?? "",
      d: requireNumber(raw.d, "d", line),
      k: optionalNumber(raw.k, "k", line),
      alpha: optionalNumber(raw.alpha, "alpha", line),
      n: requireNumber(raw.n, "n", line),
      esc: requireNumber(raw.esc, "esc", line),
      tsc: requireNumber(raw.tsc, "tsc", line),
      rel_err: requireNumber(raw.rel_err, "rel_err", line),
      seed: raw.seed ?? "",
      wall_ms: requireNumber(raw.wall_ms, "wall_ms", line),
    };
  });
}
