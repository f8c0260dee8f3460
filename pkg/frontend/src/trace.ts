/**
 * Reader for the optimizer's trace.csv files.
 *
 * Schema (one row per BO step of one run):
 *   method, rep, step, cumulative_evals, batch_size, pool_size, proposed,
 *   observed_y, incumbent_x, true_value, suboptimality
 *
 * Vectors are semicolon-joined decimals; `proposed` joins (x@s) tokens with
 * "|"; unknown true_value/suboptimality are empty fields.
 */

export interface TraceRow {
  method: string;
  rep: number;
  step: number;
  cumulativeEvals: number;
  batchSize: number;
  poolSize: number;
  proposed: string;
  observedY: number[];
  incumbentX: number[];
  trueValue: number | null;
  suboptimality: number | null;
}

export const TRACE_COLUMNS = [
  "method",
  "rep",
  "step",
  "cumulative_evals",
  "batch_size",
  "pool_size",
  "proposed",
  "observed_y",
  "incumbent_x",
  "true_value",
  "suboptimality",
] as const;

function parseIntStrict(text: string, field: string, line: number): number {
  const value = Number(text);
  if (!Number.isInteger(value)) {
    throw new Error(`trace line ${line}: field ${field} is not an integer: "${text}"`);
  }
  return value;
}

function parseFloatStrict(text: string, field: string, line: number): number {
  const value = Number(text);
  if (!Number.isFinite(value)) {
    throw new Error(`trace line ${line}: field ${field} is not a number: "${text}"`);
  }
  return value;
}

function parseOptionalFloat(text: string, field: string, line: number): number | null {
  if (text === "") return null;
  return parseFloatStrict(text, field, line);
}

function parseVector(text: string, field: string, line: number): number[] {
  if (text === "") return [];
  return text.split(";").map((part) => parseFloatStrict(part, field, line));
}

/** Parse a whole trace.csv document into typed rows. */
export function parseTrace(csv: string): TraceRow[] {
  const lines = csv.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("trace is empty");
  }
  const header = lines[0].split(",");
  if (header.join(",") !== TRACE_COLUMNS.join(",")) {
    throw new Error(`unexpected trace header: ${lines[0]}`);
  }
  const rows: TraceRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== TRACE_COLUMNS.length) {
      throw new Error(`trace line ${i + 1}: expected ${TRACE_COLUMNS.length} fields, got ${parts.length}`);
    }
    rows.push({
      method: parts[0],
      rep: parseIntStrict(parts[1], "rep", i + 1),
      step: parseIntStrict(parts[2], "step", i + 1),
      cumulativeEvals: parseIntStrict(parts[3], "cumulative_evals", i + 1),
      batchSize: parseIntStrict(parts[4], "batch_size", i + 1),
      poolSize: parseIntStrict(parts[5], "pool_size", i + 1),
      proposed: parts[6],
      observedY: parts[7] === "" ? [] : parts[7].split("|").map((v) => parseFloatStrict(v, "observed_y", i + 1)),
      incumbentX: parseVector(parts[8], "incumbent_x", i + 1),
      trueValue: parseOptionalFloat(parts[9], "true_value", i + 1),
      suboptimality: parseOptionalFloat(parts[10], "suboptimality", i + 1),
    });
  }
  return rows;
}
