import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { main, parseArgs, runPlot } from "../src/cli.js";
import { syntheticTrace } from "./helpers.js";

let dir: string;

beforeEach(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "bosh-plot-"));
});

afterEach(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

function writeTrace(csv: string): string {
  const file = path.join(dir, "trace.csv");
  fs.writeFileSync(file, csv, "utf-8");
  return file;
}

describe("argument parsing", () => {
  it("parses the full surface", () => {
    const args = parseArgs([
      "plot",
      "--trace",
      "t.csv",
      "--out",
      "figs",
      "--linear-y",
      "--x-axis",
      "evals",
    ]);
    expect(args).toEqual({ trace: "t.csv", out: "figs", linearY: true, xAxis: "evals" });
  });

  it("rejects unknown commands, options, and axis values", () => {
    expect(() => parseArgs(["draw"])).toThrow(/unknown command/);
    expect(() => parseArgs(["plot", "--nope"])).toThrow(/unknown argument/);
    expect(() => parseArgs(["plot", "--trace", "t", "--out", "o", "--x-axis", "time"])).toThrow(
      /steps.*evals/
    );
    expect(() => parseArgs(["plot", "--out", "o"])).toThrow(/--trace/);
  });
});

describe("plot command", () => {
  it("writes one figure per trace", () => {
    const trace = writeTrace(syntheticTrace(["A", "B"], 2, 4));
    const out = path.join(dir, "figs");
    const file = runPlot({ trace, out, linearY: false, xAxis: "steps" });
    expect(file).toBe(path.join(out, "suboptimality_steps.svg"));
    const svg = fs.readFileSync(file, "utf-8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(fs.readdirSync(out)).toHaveLength(1);
  });

  it("writes nothing when the trace is empty of rows", () => {
    const trace = writeTrace("method,rep,step,cumulative_evals,batch_size,pool_size,proposed,observed_y,incumbent_x,true_value,suboptimality\n");
    const out = path.join(dir, "figs");
    expect(main(["plot", "--trace", trace, "--out", out])).toBe(1);
    expect(fs.existsSync(out)).toBe(false);
  });

  it("main returns 0 on success and prints the figure path", () => {
    const trace = writeTrace(syntheticTrace(["A"], 1, 3));
    const out = path.join(dir, "figs");
    expect(main(["plot", "--trace", trace, "--out", out, "--x-axis", "evals"])).toBe(0);
    expect(fs.existsSync(path.join(out, "suboptimality_evals.svg"))).toBe(true);
  });
});
