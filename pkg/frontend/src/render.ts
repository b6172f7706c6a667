/**
 * Deterministic SVG figure: secret key rate (log scale) against distance,
 * one styled line per scenario, legend from the scenario labels.
 */

import { CurvePoint, CsvError, groupByScenario, parseCurveCsv } from "./csv.js";

export type AxisConvention = "per-arm" | "total";

export interface LineStyle {
  color: string;
  dash: string; // SVG stroke-dasharray, "" for solid
}

export interface PlotSpec {
  /** CSV documents, each with a name used in error messages. */
  inputs: { name: string; content: string }[];
  axis: AxisConvention;
  /** Optional per-scenario style overrides. */
  styles?: Record<string, LineStyle>;
}

export class RenderError extends Error {}

const WIDTH = 880;
const HEIGHT = 560;
const MARGIN = { left: 78, right: 24, top: 24, bottom: 56 };

const PALETTE: LineStyle[] = [
  { color: "#d62728", dash: "" },
  { color: "#ff7f0e", dash: "8 4 2 4" },
  { color: "#2ca02c", dash: "8 4 2 4" },
  { color: "#ff7f0e", dash: "2 4" },
  { color: "#2ca02c", dash: "2 4" },
  { color: "#9467bd", dash: "10 5" },
  { color: "#1f77b4", dash: "10 5" },
  { color: "#8c564b", dash: "" },
];

function fmt(x: number): string {
  // fixed two-decimal coordinates keep the output byte-stable
  return x.toFixed(2);
}

function tickLabel(exponent: number): string {
  return `1e${exponent}`;
}

export function render(spec: PlotSpec): string {
  if (spec.inputs.length === 0) {
    throw new RenderError("at least one input CSV is required");
  }
  const all: CurvePoint[] = [];
  const seenLabels = new Set<string>();
  for (const input of spec.inputs) {
    const points = parseCurveCsv(input.content, input.name);
    const labels = new Set(points.map((p) => p.scenario));
    for (const label of labels) {
      if (seenLabels.has(label)) {
        throw new RenderError(`scenario label '${label}' appears in more than one input`);
      }
      seenLabels.add(label);
    }
    all.push(...points);
  }

  const distanceOf = (p: CurvePoint) => (spec.axis === "total" ? p.total_km : p.L_km);
  const positive = all.filter((p) => p.key_rate > 0);
  if (positive.length === 0) {
    throw new RenderError("no positive rates to plot");
  }

  const xMax = Math.max(...all.map(distanceOf));
  const rateMin = Math.min(...positive.map((p) => p.key_rate));
  const rateMax = Math.max(...positive.map((p) => p.key_rate));
  const expLo = Math.floor(Math.log10(rateMin));
  const expHi = Math.ceil(Math.log10(rateMax));

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const xOf = (d: number) => MARGIN.left + (xMax === 0 ? 0 : (d / xMax) * plotW);
  const yOf = (rate: number) =>
    MARGIN.top + plotH - ((Math.log10(rate) - expLo) / (expHi - expLo || 1)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  // frame
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + plotH;
  parts.push(
    `<rect x="${x0}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="black" stroke-width="1"/>`,
  );

  // y ticks: one per decade, labelled 1e<exp>; this marks the log axis
  parts.push(`<g class="y-axis" font-size="13" font-family="sans-serif">`);
  for (let e = expLo; e <= expHi; e++) {
    const y = yOf(10 ** e);
    parts.push(`<line x1="${x0 - 5}" y1="${fmt(y)}" x2="${x0}" y2="${fmt(y)}" stroke="black"/>`);
    parts.push(
      `<text x="${x0 - 9}" y="${fmt(y + 4)}" text-anchor="end">${tickLabel(e)}</text>`,
    );
  }
  parts.push(`</g>`);

  // x ticks: eight even divisions
  parts.push(`<g class="x-axis" font-size="13" font-family="sans-serif">`);
  const divisions = 8;
  for (let i = 0; i <= divisions; i++) {
    const d = (xMax * i) / divisions;
    const x = xOf(d);
    parts.push(`<line x1="${fmt(x)}" y1="${y0}" x2="${fmt(x)}" y2="${y0 + 5}" stroke="black"/>`);
    parts.push(
      `<text x="${fmt(x)}" y="${y0 + 22}" text-anchor="middle">${d.toFixed(0)}</text>`,
    );
  }
  const xLabel = spec.axis === "total" ? "Distance (km, total)" : "Distance (km per arm)";
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle">${xLabel}</text>`,
  );
  parts.push(`</g>`);
  parts.push(
    `<text font-size="13" font-family="sans-serif" transform="rotate(-90)" ` +
      `x="${-(MARGIN.top + plotH / 2)}" y="20" text-anchor="middle">Secret key rate (bits per pulse)</text>`,
  );

  // curves: zero-rate points are omitted, not clipped
  const groups = groupByScenario(all);
  const labels = [...groups.keys()];
  parts.push(`<g class="curves" fill="none" stroke-width="1.8">`);
  labels.forEach((label, index) => {
    const style = spec.styles?.[label] ?? PALETTE[index % PALETTE.length];
    const pts = groups
      .get(label)!
      .filter((p) => p.key_rate > 0)
      .sort((a, b) => distanceOf(a) - distanceOf(b));
    if (pts.length === 0) return;
    const path = pts.map((p) => `${fmt(xOf(distanceOf(p)))},${fmt(yOf(p.key_rate))}`).join(" ");
    const dash = style.dash === "" ? "" : ` stroke-dasharray="${style.dash}"`;
    parts.push(`<polyline class="curve" data-scenario="${label}" points="${path}" stroke="${style.color}"${dash}/>`);
  });
  parts.push(`</g>`);

  // legend, one entry per scenario in first-appearance order
  parts.push(`<g class="legend" font-size="13" font-family="sans-serif">`);
  labels.forEach((label, index) => {
    const style = spec.styles?.[label] ?? PALETTE[index % PALETTE.length];
    const y = MARGIN.top + 16 + index * 18;
    const x = MARGIN.left + plotW - 220;
    const dash = style.dash === "" ? "" : ` stroke-dasharray="${style.dash}"`;
    parts.push(
      `<line x1="${x}" y1="${y - 4}" x2="${x + 34}" y2="${y - 4}" stroke="${style.color}" stroke-width="1.8"${dash}/>`,
    );
    parts.push(`<text class="legend-label" x="${x + 42}" y="${y}">${label}</text>`);
  });
  parts.push(`</g>`);

  parts.push(`</svg>`);
  return parts.join("\n") + "\n";
}

export { CsvError };
