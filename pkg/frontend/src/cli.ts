/** Command line: render --in <csv>... --out <svg> --axis per-arm|total */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { AxisConvention, CsvError, PlotSpec, RenderError, render } from "./render.js";

export interface RenderArgs {
  inputs: string[];
  out: string;
  axis: AxisConvention;
}

export class UsageError extends Error {}

export function parseArgs(argv: string[]): RenderArgs {
  if (argv[0] !== "render") {
    throw new UsageError("usage: render --in <csv>... --out <svg> [--axis per-arm|total]");
  }
  const inputs: string[] = [];
  let out: string | undefined;
  let axis: AxisConvention = "per-arm";
  let i = 1;
  while (i < argv.length) {
    const flag = argv[i];
    if (flag === "--in") {
      i += 1;
      while (i < argv.length && !argv[i].startsWith("--")) {
        inputs.push(argv[i]);
        i += 1;
      }
    } else if (flag === "--out") {
      out = argv[i + 1];
      i += 2;
    } else if (flag === "--axis") {
      const value = argv[i + 1];
      if (value !== "per-arm" && value !== "total") {
        throw new UsageError(`--axis must be 'per-arm' or 'total', got '${value}'`);
      }
      axis = value;
      i += 2;
    } else {
      throw new UsageError(`unknown argument '${flag}'`);
    }
  }
  if (inputs.length === 0) throw new UsageError("--in requires at least one CSV");
  if (out === undefined) throw new UsageError("--out is required");
  if (!out.endsWith(".svg")) {
    // raster output would need a rasterizer and breaks byte determinism
    throw new UsageError("only .svg output is supported");
  }
  return { inputs, out, axis };
}

export function main(argv: string[]): number {
  let args: RenderArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`usage error: ${err.message}`);
      return 2;
    }
    throw err;
  }
  try {
    const spec: PlotSpec = {
      inputs: args.inputs.map((path) => ({
        name: basename(path),
        content: readFileSync(path, "utf-8"),
      })),
      axis: args.axis,
    };
    writeFileSync(args.out, render(spec), "utf-8");
    console.log(args.out);
  } catch (err) {
    if (err instanceof CsvError || err instanceof RenderError) {
      console.error(`render error: ${err.message}`);
      return 1;
    }
    if (err instanceof Error && "code" in err) {
      console.error(`render error: ${err.message}`);
      return 1;
    }
    throw err;
  }
  return 0;
}

if (process.argv[1] !== undefined && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
