import { TRACE_COLUMNS } from "../src/trace.js";

export interface RowSpec {
  method: string;
  rep: number;
  step: number;
  suboptimality: number | null;
  cumulativeEvals?: number;
}

/** Build a syntactically faithful trace.csv document from row specs. */
export function traceCsv(rows: RowSpec[]): string {
  const lines = [TRACE_COLUMNS.join(",")];
  for (const r of rows) {
    const evals = r.cumulativeEvals ?? 6 + 5 * r.step;
    const x = (0.1 + 0.8 * ((r.step * 7 + r.rep * 13) % 10) / 10).toFixed(6);
    lines.push(
      [
        r.method,
        r.rep,
        r.step,
        evals,
        5,
        2 + (r.step % 3),
        `${x}@0|${x}@1`,
        "0.5|0.25",
        x,
        "1.25",
        r.suboptimality === null ? "" : String(r.suboptimality),
      ].join(",")
    );
  }
  return lines.join("\n") + "\n";
}

/** A well-formed synthetic-style trace: methods x reps x steps. */
export function syntheticTrace(
  methods: string[],
  reps: number,
  steps: number,
  subopt: (method: string, rep: number, step: number) => number = (m, r, s) =>
    Math.exp(-0.3 * s) * (1 + 0.1 * r) * (m.length % 3 === 0 ? 0.8 : 1.2)
): string {
  const rows: RowSpec[] = [];
  for (const method of methods) {
    for (let rep = 0; rep < reps; rep++) {
      for (let step = 1; step <= steps; step++) {
        rows.push({ method, rep, step, suboptimality: subopt(method, rep, step) });
      }
    }
  }
  return traceCsv(rows);
}
