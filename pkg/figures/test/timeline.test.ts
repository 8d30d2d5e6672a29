import { describe, expect, it } from "vitest";

import { CsvSchemaError } from "../src/csv.js";
import { renderTimeline, slidingRmse } from "../src/timeline.js";
import { roundsCsv, statesCsv } from "./fixtures.js";

const ROUNDS = roundsCsv([[5, 0, 0], [2, 1, 2], [0, 1, 4], [1, 1, 3]]);
const STATES = statesCsv([[0.0, 0.2], [0.1, 0.1], [0.0, 0.4], [0.3, 0.3]]);

describe("slidingRmse", () => {
  it("computes the across-agent deviation", () => {
    const points = slidingRmse(statesCsv([[0.0, 2.0]]));
    // positions 0 and 2: deviations +/-1 from the mean
    expect(points).toHaveLength(1);
    expect(points[0].rmse).toBeCloseTo(1.0, 12);
  });

  it("averages within the window", () => {
    const points = slidingRmse(statesCsv([[0.0, 2.0], [0.0, 0.0]]));
    expect(points[0].rmse).toBeCloseTo(0.5, 12);
    expect(points[1].rmse).toBeCloseTo(0.5, 12);
  });
});

describe("renderTimeline", () => {
  it("renders deterministically", () => {
    const a = renderTimeline(ROUNDS, STATES);
    const b = renderTimeline(ROUNDS, STATES);
    expect(a).toBe(b);
    expect(a.startsWith("<svg ")).toBe(true);
    expect(a).toContain("<polyline");
    expect(a).toContain("<rect");
  });

  it("draws one stacked bar per round with all slot kinds", () => {
    const figure = renderTimeline(ROUNDS, STATES);
    expect(figure).toContain("#c23b22"); // control
    expect(figure).toContain("#2b6cb0"); // other
    expect(figure).toContain("#d0d0d0"); // free
  });

  it("rejects an empty rounds file", () => {
    const empty = ROUNDS.split("\n")[0] + "\n";
    expect(() => renderTimeline(empty, STATES)).toThrow(CsvSchemaError);
  });

  it("rejects schema drift with column diagnostics", () => {
    const renamed = ROUNDS.replace("slots_control", "slots_ctrl");
    expect(() => renderTimeline(renamed, STATES)).toThrow(/slots_control/);
  });

  it("rejects a states file with missing columns", () => {
    const broken = STATES.replace("theta_dot,", "");
    expect(() => renderTimeline(ROUNDS, broken)).toThrow(CsvSchemaError);
  });
});
