import { describe, expect, it } from "vitest";
import {
  MARGIN,
  Viewport,
  anomalyMarkers,
  buildPlotFrame,
  clickTarget,
  edgeLines,
  hitTest,
  invertScale,
  scaleValue,
  seriesPoints,
  visibleEntries,
  zoomWindow,
} from "../src/deltaplot.js";
import { Annotation, Anomaly, DeltaEntry } from "../src/types.js";

function entry(prev: number, next: number, dx: number, dy: number): DeltaEntry {
  return {
    id: `${prev}-${next}`,
    frame_index_prev: prev,
    frame_index_next: next,
    dx,
    dy,
    gap_frames: next - prev,
  };
}

const ENTRIES = [
  entry(0, 1, 0.5, -0.2),
  entry(1, 2, 12.0, 1.0),
  entry(2, 5, -0.3, 0.1),
  entry(5, 6, 2.0, -15.0),
  entry(6, 7, 0.1, 0.4),
];

function anomaly(e: DeltaEntry, dismissed = false): Anomaly {
  return { ...e, dismissed };
}

const VIEW: Viewport = { width: 900, height: 260, xMin: null, xMax: null };

describe("scales", () => {
  it("map domain endpoints to range endpoints and invert", () => {
    const s = { domainMin: 0, domainMax: 10, rangeMin: 100, rangeMax: 300 };
    expect(scaleValue(s, 0)).toBe(100);
    expect(scaleValue(s, 10)).toBe(300);
    expect(scaleValue(s, 5)).toBe(200);
    expect(invertScale(s, scaleValue(s, 7.3))).toBeCloseTo(7.3, 10);
  });

  it("degenerate domains collapse to midrange instead of dividing by zero", () => {
    const s = { domainMin: 3, domainMax: 3, rangeMin: 0, rangeMax: 100 };
    expect(scaleValue(s, 3)).toBe(50);
  });
});

describe("plot frame", () => {
  it("fits all entries when no zoom window is set", () => {
    const frame = buildPlotFrame(ENTRIES, VIEW, 10);
    expect(frame.x.domainMin).toBe(1);
    expect(frame.x.domainMax).toBe(7);
    expect(frame.x.rangeMin).toBe(MARGIN.left);
    expect(frame.x.rangeMax).toBe(900 - MARGIN.right);
  });

  it("keeps the threshold band inside the y domain", () => {
    const quiet = [entry(0, 1, 0.1, 0.1)];
    const frame = buildPlotFrame(quiet, VIEW, 10);
    expect(frame.y.domainMax).toBeGreaterThanOrEqual(10);
    expect(frame.y.domainMin).toBeLessThanOrEqual(-10);
  });

  it("y axis is inverted for screen coordinates", () => {
    const frame = buildPlotFrame(ENTRIES, VIEW, 10);
    expect(scaleValue(frame.y, frame.y.domainMax)).toBeLessThan(
      scaleValue(frame.y, frame.y.domainMin));
  });
});

describe("visibleEntries", () => {
  it("returns everything without a window", () => {
    expect(visibleEntries(ENTRIES, VIEW)).toEqual(ENTRIES);
  });

  it("restricts by frame_index_next, inclusive", () => {
    const view = { ...VIEW, xMin: 2, xMax: 6 };
    expect(visibleEntries(ENTRIES, view).map((e) => e.id)).toEqual(["1-2", "2-5", "5-6"]);
  });
});

describe("anomaly markers", () => {
  it("produces exactly one marker per reported anomaly, same ids", () => {
    const report = [anomaly(ENTRIES[1]), anomaly(ENTRIES[3], true)];
    const frame = buildPlotFrame(ENTRIES, VIEW, 10);
    const markers = anomalyMarkers(ENTRIES, report, frame);
    expect(markers.map((m) => m.id)).toEqual(report.map((a) => a.id));
    expect(markers.map((m) => m.dismissed)).toEqual([false, true]);
  });

  it("sits on the axis with the larger displacement", () => {
    const frame = buildPlotFrame(ENTRIES, VIEW, 10);
    const markers = anomalyMarkers(ENTRIES, [anomaly(ENTRIES[3])], frame);
    // entry 5-6 tripped on dy = -15
    expect(markers[0].py).toBeCloseTo(scaleValue(frame.y, -15), 10);
    expect(markers[0].frameIndexNext).toBe(6);
  });
});

describe("click navigation", () => {
  const frame = buildPlotFrame(ENTRIES, VIEW, 10);
  const markers = anomalyMarkers(ENTRIES, [anomaly(ENTRIES[1])], frame);

  it("clicking a marker jumps to its frame_index_next", () => {
    const m = markers[0];
    expect(clickTarget(markers, frame, m.px + 3, m.py - 3)).toBe(2);
  });

  it("clicking empty plot area jumps to the nearest frame index", () => {
    const px = scaleValue(frame.x, 5.2);
    expect(clickTarget([], frame, px, 10)).toBe(5);
  });

  it("hitTest prefers the closest marker within the radius", () => {
    const twice = anomalyMarkers(ENTRIES, [anomaly(ENTRIES[1]), anomaly(ENTRIES[2])], frame);
    const near = hitTest(twice, twice[1].px + 1, twice[1].py);
    expect(near?.id).toBe("2-5");
    expect(hitTest(twice, twice[1].px + 50, twice[1].py + 50)).toBeNull();
  });
});

describe("zoom", () => {
  const frame = buildPlotFrame(ENTRIES, VIEW, 10);

  it("a drag maps back to frame-index bounds in order", () => {
    const a = scaleValue(frame.x, 2);
    const b = scaleValue(frame.x, 6);
    const win = zoomWindow(frame, b, a);
    expect(win).not.toBeNull();
    expect(win![0]).toBeCloseTo(2, 8);
    expect(win![1]).toBeCloseTo(6, 8);
  });

  it("a tiny drag counts as a click, not a zoom", () => {
    expect(zoomWindow(frame, 100, 103)).toBeNull();
  });

  it("zoomed window plus visibleEntries round-trips", () => {
    const a = scaleValue(frame.x, 2);
    const b = scaleValue(frame.x, 6);
    const [lo, hi] = zoomWindow(frame, a, b)!;
    const view = { ...VIEW, xMin: lo, xMax: hi };
    expect(visibleEntries(ENTRIES, view).map((e) => e.id)).toEqual(["1-2", "2-5", "5-6"]);
  });
});

describe("edge lines", () => {
  it("marks saccade and blink boundary states only", () => {
    const base = {
      t_start_us: 0, event_count: 0, center_x: null, center_y: null,
      source: "AUTO", reviewed: false,
    };
    const annotations: Annotation[] = [
      { ...base, frame_index: 1, saccade_state: "SACCADE_START", blink_state: "NONE" },
      { ...base, frame_index: 2, saccade_state: "SACCADE_IN_PROGRESS", blink_state: "NONE" },
      { ...base, frame_index: 3, saccade_state: "SACCADE_END", blink_state: "BLINK_START_END" },
      { ...base, frame_index: 4, saccade_state: "NONE", blink_state: "BLINK_IN_PROGRESS" },
      { ...base, frame_index: 5, saccade_state: "SACCADE_START_END", blink_state: "BLINK_END" },
    ];
    expect(edgeLines(annotations)).toEqual([
      { frameIndex: 1, kind: "saccade" },
      { frameIndex: 3, kind: "saccade" },
      { frameIndex: 3, kind: "blink" },
      { frameIndex: 5, kind: "saccade" },
      { frameIndex: 5, kind: "blink" },
    ]);
  });
});
