#!/usr/bin/env node
/**
 * Figure generation from a finished experiment:
 *
 *   bosh-plot plot --trace <path/to/trace.csv> --out <dir> [--linear-y]
 *                  [--x-axis steps|evals]
 *
 * Emits one SVG per trace file (a trace covers one benchmark) with one
 * labeled curve and standard-error band per method found in the trace.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { aggregate } from "./aggregate.js";
import { renderFigure } from "./render.js";
import { parseTrace } from "./trace.js";

export interface PlotArgs {
  trace: string;
  out: string;
  linearY: boolean;
  xAxis: "steps" | "evals";
}

export function parseArgs(argv: string[]): PlotArgs {
  if (argv[0] !== "plot") {
    throw new Error(`unknown command "${argv[0] ?? ""}"; expected: plot`);
  }
  const args: Partial<PlotArgs> = { linearY: false, xAxis: "steps" };
  for (let i = 1; i < argv.length; i++) {
    switch (argv[i]) {
      case "--trace":
        args.trace = argv[++i];
        break;
      case "--out":
        args.out = argv[++i];
        break;
      case "--linear-y":
        args.linearY = true;
        break;
      case "--x-axis": {
        const value = argv[++i];
        if (value !== "steps" && value !== "evals") {
          throw new Error(`--x-axis must be "steps" or "evals", got "${value}"`);
        }
        args.xAxis = value;
        break;
      }
      default:
        throw new Error(`unknown argument "${argv[i]}"`);
    }
  }
  if (!args.trace) throw new Error("--trace is required");
  if (!args.out) throw new Error("--out is required");
  return args as PlotArgs;
}

/** Run the plot command; returns the path of the figure it wrote. */
export function runPlot(args: PlotArgs): string {
  const csv = fs.readFileSync(args.trace, "utf-8");
  const series = aggregate(parseTrace(csv));
  const svg = renderFigure(series, { xAxis: args.xAxis, logY: !args.linearY });
  fs.mkdirSync(args.out, { recursive: true });
  const name = `suboptimality_${args.xAxis}.svg`;
  const file = path.join(args.out, name);
  fs.writeFileSync(file, svg, "utf-8");
  return file;
}

export function main(argv: string[]): number {
  try {
    const file = runPlot(parseArgs(argv));
    console.log(`wrote ${file}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("bosh-plot")) {
  process.exit(main(process.argv.slice(2)));
}
