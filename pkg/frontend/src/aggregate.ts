/**
 * Reduce trace rows to per-method convergence curves: mean suboptimality
 * per step with a standard-error band, aggregated over repetitions.
 */

import { TraceRow } from "./trace.js";

export interface CurveSeries {
  method: string;
  steps: number[];
  cumulativeEvals: number[];
  mean: number[];
  standardError: number[];
  repetitions: number;
}

/** Sample standard deviation (n-1 denominator); a single sample has sd 0. */
function sampleSd(values: number[]): number {
  const n = values.length;
  if (n <= 1) return 0;
  const mean = values.reduce((a, b) => a + b, 0) / n;
  const ss = values.reduce((acc, v) => acc + (v - mean) * (v - mean), 0);
  return Math.sqrt(ss / (n - 1));
}

/**
 * Group rows by method and reduce over repetitions at each step.
 *
 * Every repetition of a method must cover the same step sequence; a ragged
 * method is an error (named in the message). Missing suboptimality values
 * (benchmarks without a truth oracle) are also an error: there is nothing
 * to plot for them.
 */
export function aggregate(rows: TraceRow[]): CurveSeries[] {
  const methods: string[] = [];
  const byMethod = new Map<string, Map<number, TraceRow[]>>();
  for (const row of rows) {
    if (!byMethod.has(row.method)) {
      byMethod.set(row.method, new Map());
      methods.push(row.method);
    }
    const reps = byMethod.get(row.method)!;
    if (!reps.has(row.rep)) reps.set(row.rep, []);
    reps.get(row.rep)!.push(row);
  }

  const series: CurveSeries[] = [];
  for (const method of methods) {
    const reps = byMethod.get(method)!;
    const repIds = [...reps.keys()].sort((a, b) => a - b);
    const perRep = repIds.map((rep) =>
      [...reps.get(rep)!].sort((a, b) => a.step - b.step)
    );

    const stepKey = (rows: TraceRow[]) => rows.map((r) => r.step).join(",");
    const reference = stepKey(perRep[0]);
    for (let i = 1; i < perRep.length; i++) {
      if (stepKey(perRep[i]) !== reference) {
        throw new Error(
          `method ${method}: repetitions disagree on step counts (rep ${repIds[0]} has ` +
            `${perRep[0].length} steps, rep ${repIds[i]} has ${perRep[i].length})`
        );
      }
    }

    const steps = perRep[0].map((r) => r.step);
    const cumulativeEvals = perRep[0].map((r) => r.cumulativeEvals);
    const mean: number[] = [];
    const standardError: number[] = [];
    for (let i = 0; i < steps.length; i++) {
      const values = perRep.map((rows) => {
        if (rows[i].suboptimality === null) {
          throw new Error(`method ${method}: missing suboptimality at step ${rows[i].step}`);
        }
        return rows[i].suboptimality as number;
      });
      mean.push(values.reduce((a, b) => a + b, 0) / values.length);
      standardError.push(sampleSd(values) / Math.sqrt(values.length));
    }
    series.push({ method, steps, cumulativeEvals, mean, standardError, repetitions: repIds.length });
  }
  return series;
}
