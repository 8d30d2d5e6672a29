/**
 * Round-utilization timeline: a sliding-window synchronization-RMSE curve
 * over stacked per-round slot-type bars (control / other / free).
 */

import { CsvSchemaError, numberColumn, parseCsv, requireColumns, requireRows } from "./csv.js";
import * as svg from "./svg.js";

export const ROUNDS_COLUMNS = ["round", "time_s", "slots_control", "slots_other",
  "slots_free", "sent_agents", "lost_to_manager", "radio_on_s"];
export const STATES_COLUMNS = ["time_s", "agent", "s", "s_dot", "theta",
  "theta_dot", "u_applied"];

const WIDTH = 960;
const MARGIN = { left: 64, right: 16, top: 28, bottom: 34 };
const RMSE_HEIGHT = 170;
const GAP = 40;
const BARS_HEIGHT = 130;
const COLORS = { control: "#c23b22", other: "#2b6cb0", free: "#d0d0d0", rmse: "#1a1a1a" };
const WINDOW_S = 2.0;

interface RmsePoint {
  time: number;
  rmse: number;
}

/** Across-agent RMS deviation of cart position per time step, then a
 *  centered sliding-window average. */
export function slidingRmse(statesText: string): RmsePoint[] {
  const table = parseCsv(statesText, "states.csv");
  requireColumns(table, STATES_COLUMNS);
  requireRows(table, 1);
  const times = numberColumn(table, "time_s");
  const positions = numberColumn(table, "s");

  const byTime = new Map<number, number[]>();
  const order: number[] = [];
  for (let i = 0; i < times.length; i++) {
    let bucket = byTime.get(times[i]);
    if (!bucket) {
      bucket = [];
      byTime.set(times[i], bucket);
      order.push(times[i]);
    }
    bucket.push(positions[i]);
  }
  const instant: RmsePoint[] = order.map((t) => {
    const xs = byTime.get(t)!;
    const mean = xs.reduce((a, b) => a + b, 0) / xs.length;
    const ms = xs.reduce((a, b) => a + (b - mean) * (b - mean), 0) / xs.length;
    return { time: t, rmse: Math.sqrt(ms) };
  });

  const half = WINDOW_S / 2;
  const out: RmsePoint[] = [];
  let lo = 0;
  let hi = 0;
  let acc = 0;
  for (let i = 0; i < instant.length; i++) {
    while (hi < instant.length && instant[hi].time <= instant[i].time + half) {
      acc += instant[hi].rmse;
      hi++;
    }
    while (instant[lo].time < instant[i].time - half) {
      acc -= instant[lo].rmse;
      lo++;
    }
    out.push({ time: instant[i].time, rmse: acc / (hi - lo) });
  }
  // long runs carry one point per 10 ms step; thin for a sane file size
  const stride = Math.max(1, Math.ceil(out.length / 2400));
  return out.filter((_, i) => i % stride === 0 || i === out.length - 1);
}

export function renderTimeline(roundsText: string, statesText: string): string {
  const rounds = parseCsv(roundsText, "rounds.csv");
  requireColumns(rounds, ROUNDS_COLUMNS);
  requireRows(rounds, 1);
  const roundTimes = numberColumn(rounds, "time_s");
  const control = numberColumn(rounds, "slots_control");
  const other = numberColumn(rounds, "slots_other");
  const free = numberColumn(rounds, "slots_free");
  const slotsPerRound = control[0] + other[0] + free[0];
  if (slotsPerRound <= 0) {
    throw new CsvSchemaError("rounds.csv: slot counts sum to zero");
  }

  const rmse = slidingRmse(statesText);
  const tMax = Math.max(roundTimes[roundTimes.length - 1], rmse[rmse.length - 1].time);
  const x = svg.linearScale([0, tMax], [MARGIN.left, WIDTH - MARGIN.right]);

  const body: string[] = [];

  // top panel: sliding-window RMSE
  const rmseMax = Math.max(...rmse.map((p) => p.rmse)) * 1.1 || 1;
  const yTop = svg.linearScale([0, rmseMax], [MARGIN.top + RMSE_HEIGHT, MARGIN.top]);
  body.push(svg.text(WIDTH / 2, MARGIN.top - 12, "synchronization error and slot usage over time", { size: 13 }));
  for (const tick of svg.niceTicks(0, rmseMax, 4)) {
    body.push(svg.line(MARGIN.left - 4, yTop(tick), WIDTH - MARGIN.right, yTop(tick), "#eeeeee"));
    body.push(svg.text(MARGIN.left - 8, yTop(tick) + 4, svg.fmt(tick), { anchor: "end", size: 10 }));
  }
  body.push(svg.polyline(rmse.map((p) => [x(p.time), yTop(p.rmse)]), COLORS.rmse));
  body.push(svg.line(MARGIN.left, MARGIN.top, MARGIN.left, MARGIN.top + RMSE_HEIGHT, "#444444"));
  body.push(svg.line(MARGIN.left, MARGIN.top + RMSE_HEIGHT, WIDTH - MARGIN.right, MARGIN.top + RMSE_HEIGHT, "#444444"));
  body.push(svg.text(18, MARGIN.top + RMSE_HEIGHT / 2, "position RMSE (m)", { rotate: true, size: 11 }));

  // bottom panel: stacked slot bars, one per round
  const barsTop = MARGIN.top + RMSE_HEIGHT + GAP;
  const yBars = svg.linearScale([0, slotsPerRound], [barsTop + BARS_HEIGHT, barsTop]);
  const barWidth = Math.max((WIDTH - MARGIN.left - MARGIN.right) / roundTimes.length, 0.4);
  for (let r = 0; r < roundTimes.length; r++) {
    const x0 = x(roundTimes[r]);
    let level = 0;
    for (const [count, color] of [
      [control[r], COLORS.control],
      [other[r], COLORS.other],
      [free[r], COLORS.free],
    ] as Array<[number, string]>) {
      if (count > 0) {
        body.push(svg.rect(x0, yBars(level + count), barWidth,
          yBars(level) - yBars(level + count), color));
        level += count;
      }
    }
  }
  body.push(svg.line(MARGIN.left, barsTop, MARGIN.left, barsTop + BARS_HEIGHT, "#444444"));
  body.push(svg.line(MARGIN.left, barsTop + BARS_HEIGHT, WIDTH - MARGIN.right, barsTop + BARS_HEIGHT, "#444444"));
  for (let s = 0; s <= slotsPerRound; s++) {
    body.push(svg.text(MARGIN.left - 8, yBars(s) + 4, String(s), { anchor: "end", size: 10 }));
  }
  body.push(svg.text(18, barsTop + BARS_HEIGHT / 2, "slots per round", { rotate: true, size: 11 }));
  const legendY = barsTop + BARS_HEIGHT + 26;
  let legendX = MARGIN.left;
  for (const [label, color] of [["control", COLORS.control], ["other", COLORS.other],
    ["free (radio off)", COLORS.free]] as Array<[string, string]>) {
    body.push(svg.rect(legendX, legendY - 9, 10, 10, color));
    body.push(svg.text(legendX + 15, legendY, label, { anchor: "start", size: 11 }));
    legendX += 28 + label.length * 6;
  }
  for (const tick of svg.niceTicks(0, tMax, 6)) {
    body.push(svg.text(x(tick), barsTop + BARS_HEIGHT + 14, svg.fmt(tick), { size: 10 }));
  }
  body.push(svg.text(WIDTH / 2, legendY, "time (s)", { size: 11 }));

  return svg.document(WIDTH, legendY + 16, body);
}
