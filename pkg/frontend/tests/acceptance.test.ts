/**
 * Plot-pipeline acceptance: from a 2-method, 5-repetition, 10-step trace
 * produced by the experiment runner on the synthetic benchmark, the plotter
 * emits one figure with exactly two labeled curves and standard-error
 * bands, and the aggregation matches hand-computed means/SEs exactly.
 */

import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { aggregate } from "../src/aggregate.js";
import { runPlot } from "../src/cli.js";
import { parseTrace } from "../src/trace.js";

const FIXTURE = path.join(
  path.dirname(fileURLToPath(import.meta.url)),
  "fixtures",
  "synthetic_trace.csv"
);

function handMeanAndSe(values: number[]): [number, number] {
  const n = values.length;
  const mean = values.reduce((a, b) => a + b, 0) / n;
  const ss = values.reduce((acc, v) => acc + (v - mean) ** 2, 0);
  const se = n > 1 ? Math.sqrt(ss / (n - 1)) / Math.sqrt(n) : 0;
  return [mean, se];
}

describe("plot pipeline acceptance", () => {
  const csv = fs.readFileSync(FIXTURE, "utf-8");
  const rows = parseTrace(csv);

  it("the fixture is a 2-method, 5-rep, 10-step synthetic trace", () => {
    const methods = [...new Set(rows.map((r) => r.method))];
    expect(methods).toHaveLength(2);
    expect(new Set(rows.map((r) => r.rep)).size).toBe(5);
    expect(Math.max(...rows.map((r) => r.step))).toBe(10);
    expect(rows).toHaveLength(2 * 5 * 10);
  });

  it("emits one figure with exactly 2 labeled curves and SE bands", () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "bosh-a11-"));
    try {
      const file = runPlot({ trace: FIXTURE, out: dir, linearY: false, xAxis: "steps" });
      expect(fs.readdirSync(dir)).toHaveLength(1);
      const svg = fs.readFileSync(file, "utf-8");
      expect((svg.match(/class="curve"/g) ?? []).length).toBe(2);
      expect((svg.match(/class="band"/g) ?? []).length).toBe(2);
      const methods = [...new Set(rows.map((r) => r.method))];
      for (const method of methods) {
        expect(svg).toContain(`data-method="${method}"`);
        expect(svg).toContain(`${method} (n=5)`);
      }
      console.log(`[A11] PASS - figure with 2 labeled curves and SE bands at ${file}`);
    } finally {
      fs.rmSync(dir, { recursive: true, force: true });
    }
  });

  it("aggregate matches hand-computed mean/SE to 1e-12", () => {
    const series = aggregate(rows);
    expect(series).toHaveLength(2);
    for (const s of series) {
      expect(s.repetitions).toBe(5);
      expect(s.steps).toEqual([1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
      for (const stepIndex of [0, 4, 9]) {
        const values = rows
          .filter((r) => r.method === s.method && r.step === s.steps[stepIndex])
          .map((r) => r.suboptimality as number);
        const [mean, se] = handMeanAndSe(values);
        expect(Math.abs(s.mean[stepIndex] - mean)).toBeLessThanOrEqual(1e-12);
        expect(Math.abs(s.standardError[stepIndex] - se)).toBeLessThanOrEqual(1e-12);
      }
    }
  });
});
