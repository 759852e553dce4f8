#!/usr/bin/env node
/**
 * plots render --csv results.csv --preset fig4a|fig4b|err-vs-n --out fig.svg
 *
 * Optional: --window N overrides the preset's moving-average window.
 */
import { parseArgs } from "node:util";

import { presetSpec, PRESETS } from "./plotspec.js";
import { render } from "./render.js";

export async function runCli(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  if (command !== "render") {
    process.stderr.write(
      `error: expected the "render" command, got ${command === undefined ? "nothing" : JSON.stringify(command)}\n` +
        `usage: plots render --csv results.csv --preset ${Object.keys(PRESETS).join("|")} --out fig.svg [--window N]\n`,
    );
    return 2;
  }
  try {
    const { values } = parseArgs({
      args: rest,
      options: {
        csv: { type: "string" },
        preset: { type: "string" },
        out: { type: "string" },
        window: { type: "string" },
      },
    });
    for (const flag of ["csv", "preset", "out"] as const) {
      if (!values[flag]) throw new Error(`missing required --${flag}`);
    }
    let window: number | undefined;
    if (values.window !== undefined) {
      window = Number(values.window);
      if (!Number.isInteger(window) || window < 1) {
        throw new Error(`--window must be a positive integer, got ${values.window}`);
      }
    }
    const spec = presetSpec(values.preset!, values.csv!, values.out!, window);
    await render(spec, (m) => process.stderr.write(`warning: ${m}\n`));
    process.stderr.write(`wrote ${spec.out}\n`);
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`);
    return 2;
  }
}

const entry = process.argv[1];
if (entry !== undefined && import.meta.url.endsWith(entry.split("/").pop()!)) {
  runCli(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
