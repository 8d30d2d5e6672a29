export function roundsCsv(rounds: Array<[number, number, number]>): string {
  const header = "round,time_s,slots_control,slots_other,slots_free," +
    "sent_agents,lost_to_manager,radio_on_s";
  const lines = rounds.map(([control, other, free], r) =>
    `${r},${(r * 0.05).toFixed(2)},${control},${other},${free},0;1,,0.016`);
  return [header, ...lines].join("\n") + "\n";
}

export function statesCsv(positions: number[][], agents = 2): string {
  const header = "time_s,agent,s,s_dot,theta,theta_dot,u_applied";
  const lines: string[] = [];
  positions.forEach((row, k) => {
    for (let agent = 0; agent < agents; agent++) {
      lines.push(`${(k * 0.01).toFixed(2)},${agent},${row[agent]},0,0,0,0.5`);
    }
  });
  return [header, ...lines].join("\n") + "\n";
}

const METRICS = ["control_fraction", "other_fraction", "free_fraction", "rmse",
  "duty_cycle", "savings", "cost"];

export interface SummaryRow {
  delta: number;
  control_fraction: number;
  rmse: number;
  duty_cycle: number;
  other_fraction: number;
  spread?: number;
}

export function sweepSummaryCsv(rows: SummaryRow[]): string {
  const header = ["delta", "n_seeds",
    ...METRICS.flatMap((m) => [`${m}_median`, `${m}_p25`, `${m}_p75`])].join(",");
  const lines = rows.map((row) => {
    const spread = row.spread ?? 0;
    const values: Record<string, number> = {
      control_fraction: row.control_fraction,
      other_fraction: row.other_fraction,
      free_fraction: Math.max(0, 1 - row.control_fraction - row.other_fraction),
      rmse: row.rmse,
      duty_cycle: row.duty_cycle,
      savings: 1 - row.control_fraction,
      cost: row.rmse * 10,
    };
    const cells = [String(row.delta), "3"];
    for (const metric of METRICS) {
      const v = values[metric];
      cells.push(String(v), String(v - spread), String(v + spread));
    }
    return cells.join(",");
  });
  return [header, ...lines].join("\n") + "\n";
}
