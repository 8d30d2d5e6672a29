/**
 * Trade-off panels from a threshold sweep: control performance, radio duty
 * cycle, and other-traffic share against the control bandwidth fraction,
 * with 25th/75th-percentile bands around the medians.
 */

import { numberColumn, parseCsv, requireColumns, requireRows, Table } from "./csv.js";
import * as svg from "./svg.js";

const METRICS = ["control_fraction", "other_fraction", "free_fraction", "rmse",
  "duty_cycle", "savings", "cost"];

export const SWEEP_SUMMARY_COLUMNS = ["delta", "n_seeds",
  ...METRICS.flatMap((m) => [`${m}_median`, `${m}_p25`, `${m}_p75`])];

const WIDTH = 420;
const HEIGHT = 320;
const MARGIN = { left: 64, right: 14, top: 30, bottom: 44 };

export interface PanelSpec {
  key: string;
  file: string;
  title: string;
  yLabel: string;
}

export const PANELS: PanelSpec[] = [
  { key: "rmse", file: "tradeoff_rmse.svg", title: "control performance",
    yLabel: "position RMSE (m)" },
  { key: "duty_cycle", file: "tradeoff_duty.svg", title: "communication energy",
    yLabel: "radio duty cycle (control traffic)" },
  { key: "other_fraction", file: "tradeoff_other.svg", title: "flexibility",
    yLabel: "bandwidth for other traffic" },
];

interface SeriesPoint {
  x: number;
  median: number;
  p25: number;
  p75: number;
}

function series(table: Table, key: string): SeriesPoint[] {
  const xs = numberColumn(table, "control_fraction_median");
  const median = numberColumn(table, `${key}_median`);
  const p25 = numberColumn(table, `${key}_p25`);
  const p75 = numberColumn(table, `${key}_p75`);
  const points = xs.map((x, i) => ({ x, median: median[i], p25: p25[i], p75: p75[i] }));
  points.sort((a, b) => a.x - b.x);
  return points;
}

export function renderPanel(table: Table, spec: PanelSpec): string {
  const points = series(table, spec.key);
  const x = svg.linearScale([0, 1], [MARGIN.left, WIDTH - MARGIN.right]);
  const lo = Math.min(...points.map((p) => p.p25));
  const hi = Math.max(...points.map((p) => p.p75));
  const pad = (hi - lo) * 0.15 || Math.abs(hi) * 0.1 || 1e-3;
  const y = svg.linearScale([Math.max(0, lo - pad), hi + pad],
    [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const body: string[] = [];
  body.push(svg.text(WIDTH / 2, MARGIN.top - 12, spec.title, { size: 13 }));
  for (const tick of svg.niceTicks(y.domain[0], y.domain[1], 5)) {
    body.push(svg.line(MARGIN.left - 4, y(tick), WIDTH - MARGIN.right, y(tick), "#eeeeee"));
    body.push(svg.text(MARGIN.left - 8, y(tick) + 4, svg.fmt(tick), { anchor: "end", size: 10 }));
  }
  for (const tick of svg.niceTicks(0, 1, 5)) {
    body.push(svg.text(x(tick), HEIGHT - MARGIN.bottom + 16, svg.fmt(tick), { size: 10 }));
  }
  body.push(svg.band(
    points.map((p) => [x(p.x), y(p.p75)] as [number, number]),
    points.map((p) => [x(p.x), y(p.p25)] as [number, number]),
    "#9ec4e8"));
  body.push(svg.polyline(points.map((p) => [x(p.x), y(p.median)]), "#1f4e79", 2));
  for (const p of points) {
    body.push(`<circle cx="${svg.fmt(x(p.x))}" cy="${svg.fmt(y(p.median))}" r="2.5" fill="#1f4e79"/>`);
  }
  body.push(svg.line(MARGIN.left, MARGIN.top, MARGIN.left, HEIGHT - MARGIN.bottom, "#444444"));
  body.push(svg.line(MARGIN.left, HEIGHT - MARGIN.bottom, WIDTH - MARGIN.right,
    HEIGHT - MARGIN.bottom, "#444444"));
  body.push(svg.text(18, (MARGIN.top + HEIGHT - MARGIN.bottom) / 2, spec.yLabel,
    { rotate: true, size: 11 }));
  body.push(svg.text((MARGIN.left + WIDTH - MARGIN.right) / 2, HEIGHT - 10,
    "fraction of bandwidth used for control traffic", { size: 11 }));
  return svg.document(WIDTH, HEIGHT, body);
}

/** Render all three panels; returns file name -> SVG text. */
export function renderTradeoff(sweepSummaryText: string): Map<string, string> {
  const table = parseCsv(sweepSummaryText, "sweep_summary.csv");
  requireColumns(table, SWEEP_SUMMARY_COLUMNS);
  requireRows(table, 2);
  const out = new Map<string, string>();
  for (const spec of PANELS) {
    out.set(spec.file, renderPanel(table, spec));
  }
  return out;
}
