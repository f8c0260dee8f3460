/**
 * SVG figure builder: one convergence plot per trace, one labeled curve and
 * shaded +-1 standard-error band per method.
 *
 * Rendering is a pure function of (series, options): byte-identical output
 * for identical inputs. The y axis is logarithmic by default because
 * suboptimality commonly spans decades; non-positive values (an exact
 * optimum was found) are clamped, for display only, to half the smallest
 * positive plotted value.
 */

import { CurveSeries } from "./aggregate.js";

export interface RenderOptions {
  xAxis?: "steps" | "evals";
  logY?: boolean;
  width?: number;
  height?: number;
  title?: string;
}

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#e377c2",
  "#17becf",
  "#bcbd22",
  "#7f7f7f",
];

/** Stable color assignment: same method name, same color, in any figure. */
export function colorFor(method: string): string {
  let hash = 5381;
  for (let i = 0; i < method.length; i++) {
    hash = ((hash << 5) + hash + method.charCodeAt(i)) >>> 0;
  }
  return PALETTE[hash % PALETTE.length];
}

function fmt(value: number): string {
  return Number(value.toPrecision(6)).toString();
}

function ticks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) return [lo];
  const out: number[] = [];
  for (let i = 0; i <= count; i++) out.push(lo + ((hi - lo) * i) / count);
  return out;
}

function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let p = Math.ceil(lo); p <= Math.floor(hi); p++) out.push(p);
  if (out.length === 0) out.push(lo, hi);
  return out;
}

/** Render the figure; returns the SVG document as a string. */
export function renderFigure(series: CurveSeries[], options: RenderOptions = {}): string {
  if (series.length === 0) {
    throw new Error("nothing to render: no curve series");
  }
  const xAxis = options.xAxis ?? "steps";
  const logY = options.logY ?? true;
  const width = options.width ?? 720;
  const height = options.height ?? 480;
  const margin = { left: 64, right: 16, top: 28, bottom: 46 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;

  const xOf = (s: CurveSeries, i: number) => (xAxis === "steps" ? s.steps[i] : s.cumulativeEvals[i]);

  let minPositive = Infinity;
  for (const s of series) {
    for (let i = 0; i < s.mean.length; i++) {
      for (const v of [s.mean[i], s.mean[i] - s.standardError[i]]) {
        if (v > 0 && v < minPositive) minPositive = v;
      }
    }
  }
  if (logY && !Number.isFinite(minPositive)) {
    throw new Error("log-scale y requires at least one positive value; use the linear-y option");
  }
  const floor = logY ? minPositive / 2 : -Infinity;
  const tY = (v: number) => (logY ? Math.log10(Math.max(v, floor)) : v);

  let xLo = Infinity,
    xHi = -Infinity,
    yLo = Infinity,
    yHi = -Infinity;
  for (const s of series) {
    for (let i = 0; i < s.mean.length; i++) {
      const x = xOf(s, i);
      xLo = Math.min(xLo, x);
      xHi = Math.max(xHi, x);
      yLo = Math.min(yLo, tY(s.mean[i] - s.standardError[i]), tY(s.mean[i]));
      yHi = Math.max(yHi, tY(s.mean[i] + s.standardError[i]), tY(s.mean[i]));
    }
  }
  if (!(xHi > xLo)) xHi = xLo + 1;
  if (!(yHi > yLo)) yHi = yLo + 1;
  const pad = 0.04 * (yHi - yLo);
  yLo -= pad;
  yHi += pad;

  const px = (x: number) => margin.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const py = (y: number) => margin.top + (1 - (y - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif" font-size="12">`
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (options.title) {
    parts.push(
      `<text x="${width / 2}" y="18" text-anchor="middle" font-size="14">${options.title}</text>`
    );
  }

  // axes and ticks
  const axisColor = "#333333";
  parts.push(
    `<line x1="${margin.left}" y1="${margin.top}" x2="${margin.left}" y2="${margin.top + plotH}" stroke="${axisColor}"/>`,
    `<line x1="${margin.left}" y1="${margin.top + plotH}" x2="${margin.left + plotW}" y2="${margin.top + plotH}" stroke="${axisColor}"/>`
  );
  for (const x of ticks(xLo, xHi, 6)) {
    parts.push(
      `<line x1="${fmt(px(x))}" y1="${margin.top + plotH}" x2="${fmt(px(x))}" y2="${margin.top + plotH + 4}" stroke="${axisColor}"/>`,
      `<text x="${fmt(px(x))}" y="${margin.top + plotH + 18}" text-anchor="middle">${fmt(x)}</text>`
    );
  }
  const yTicks = logY ? logTicks(yLo, yHi) : ticks(yLo, yHi, 5);
  for (const y of yTicks) {
    const label = logY ? `1e${fmt(y)}` : fmt(y);
    parts.push(
      `<line x1="${margin.left - 4}" y1="${fmt(py(y))}" x2="${margin.left}" y2="${fmt(py(y))}" stroke="${axisColor}"/>`,
      `<text x="${margin.left - 8}" y="${fmt(py(y) + 4)}" text-anchor="end">${label}</text>`
    );
  }
  const xLabel = xAxis === "steps" ? "BO step" : "cumulative evaluations";
  parts.push(
    `<text x="${margin.left + plotW / 2}" y="${height - 10}" text-anchor="middle">${xLabel}</text>`,
    `<text x="16" y="${margin.top + plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${margin.top + plotH / 2})">mean suboptimality${logY ? " (log scale)" : ""}</text>`
  );

  // one band + one curve per method
  for (const s of series) {
    const color = colorFor(s.method);
    const upper = s.mean.map((m, i) => [px(xOf(s, i)), py(tY(m + s.standardError[i]))]);
    const lower = s.mean.map((m, i) => [px(xOf(s, i)), py(tY(m - s.standardError[i]))]);
    const band = [...upper, ...lower.reverse()]
      .map(([x, y]) => `${fmt(x)},${fmt(y)}`)
      .join(" ");
    parts.push(
      `<polygon class="band" data-method="${s.method}" points="${band}" fill="${color}" opacity="0.18"/>`
    );
    const path = s.mean
      .map((m, i) => `${i === 0 ? "M" : "L"}${fmt(px(xOf(s, i)))},${fmt(py(tY(m)))}`)
      .join(" ");
    parts.push(
      `<path class="curve" data-method="${s.method}" d="${path}" fill="none" stroke="${color}" stroke-width="1.8"/>`
    );
  }

  // legend
  series.forEach((s, i) => {
    const y = margin.top + 10 + 18 * i;
    const x = margin.left + 12;
    parts.push(
      `<rect x="${x}" y="${y - 9}" width="14" height="4" fill="${colorFor(s.method)}"/>`,
      `<text class="legend" x="${x + 20}" y="${y - 2}">${s.method} (n=${s.repetitions})</text>`
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
