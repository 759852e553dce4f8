import { describe, expect, it } from "vitest";

import { CsvSchemaError, parseBenchCsv } from "../src/csv.js";

const HEADER = "method,d,k,alpha,n,esc,tsc,rel_err,seed,wall_ms";

describe("parseBenchCsv", () => {
  it("round-trips a well-formed file", () => {
    const rows = parseBenchCsv(
      [
        HEADER,
        "full,64,,,400,64,25600,0.125,7,1.5",
        "sqrt-ruler,64,8,0.5,400,15,6000,0.25,340282366920938463463374607431768211455,2",
      ].join("\n"),
    );
    expect(rows).toHaveLength(2);
    expect(rows[0]).toMatchObject({ method: "full", d: 64, k: null, alpha: null, tsc: 25600 });
    expect(rows[1]!.k).toBe(8);
    expect(rows[1]!.alpha).toBe(0.5);
    // 128-bit seeds exceed Number.MAX_SAFE_INTEGER and must survive as text.
    expect(rows[1]!.seed).toBe("340282366920938463463374607431768211455");
  });

  it("names the missing column", () => {
    const noTsc = HEADER.replace(",tsc", "");
    expect(() => parseBenchCsv(`${noTsc}\nfull,64,,,400,64,0.125,7,1.5`)).toThrowError(
      /missing column "tsc"/,
    );
  });

  it("rejects unknown columns", () => {
    expect(() => parseBenchCsv(`${HEADER},extra\nfull,64,,,400,64,25600,0.125,7,1.5,x`)).toThrowError(
      /unknown column "extra"/,
    );
  });

  it("points at the malformed cell", () => {
    const err = () =>
      parseBenchCsv([HEADER, "full,64,,,400,64,25600,0.125,7,1.5", "full,sixty,,,400,64,25600,0.125,7,1.5"].join("\n"));
    expect(err).toThrowError(CsvSchemaError);
    expect(err).toThrowError(/line 3: column "d"/);
  });
});
