export { parseTrace, TRACE_COLUMNS } from "./trace.js";
export type { TraceRow } from "./trace.js";
export { aggregate } from "./aggregate.js";
export type { CurveSeries } from "./aggregate.js";
export { colorFor, renderFigure } from "./render.js";
export type { RenderOptions } from "./render.js";
export { main, parseArgs, runPlot } from "./cli.js";
export type { PlotArgs } from "./cli.js";
