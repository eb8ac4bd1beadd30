import { describe, expect, it } from "vitest";
import { BLINK_CYCLE, SACCADE_CYCLE, nextInCycle } from "../src/states.js";

describe("label cycles", () => {
  it("both cycles start at NONE and have the four event states", () => {
    expect(SACCADE_CYCLE[0]).toBe("NONE");
    expect(BLINK_CYCLE[0]).toBe("NONE");
    expect(SACCADE_CYCLE).toHaveLength(5);
    expect(BLINK_CYCLE).toHaveLength(5);
  });

  it("nextInCycle wraps around", () => {
    let v: string = "NONE";
    for (let i = 0; i < SACCADE_CYCLE.length; i++) v = nextInCycle(SACCADE_CYCLE, v);
    expect(v).toBe("NONE");
  });

  it("unknown legacy values restart the cycle", () => {
    expect(nextInCycle(BLINK_CYCLE, "BLINK_STATUS")).toBe("NONE");
  });
});
