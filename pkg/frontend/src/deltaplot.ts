// Geometry for the delta review plot, kept free of canvas calls so the
// marker and navigation logic can be tested headless. The renderer in
// app.ts only draws what these functions return.

import { Annotation, Anomaly, DeltaEntry } from "./types.js";

export interface Viewport {
  width: number;
  height: number;
  // Zoom window in frame-index units; null means fit all entries.
  xMin: number | null;
  xMax: number | null;
}

export interface LinearScale {
  domainMin: number;
  domainMax: number;
  rangeMin: number;
  rangeMax: number;
}

export function scaleValue(s: LinearScale, v: number): number {
  const span = s.domainMax - s.domainMin;
  if (span === 0) return (s.rangeMin + s.rangeMax) / 2;
  return s.rangeMin + ((v - s.domainMin) / span) * (s.rangeMax - s.rangeMin);
}

export function invertScale(s: LinearScale, px: number): number {
  const span = s.rangeMax - s.rangeMin;
  if (span === 0) return s.domainMin;
  return s.domainMin + ((px - s.rangeMin) / span) * (s.domainMax - s.domainMin);
}

export const MARGIN = { left: 44, right: 10, top: 10, bottom: 24 };

export interface PlotFrame {
  x: LinearScale;
  y: LinearScale;
}

export function visibleEntries(entries: DeltaEntry[], view: Viewport): DeltaEntry[] {
  if (view.xMin === null || view.xMax === null) return entries;
  const lo = Math.min(view.xMin, view.xMax);
  const hi = Math.max(view.xMin, view.xMax);
  return entries.filter((e) => e.frame_index_next >= lo && e.frame_index_next <= hi);
}

export function buildPlotFrame(entries: DeltaEntry[], view: Viewport,
                               thresholdPx: number): PlotFrame {
  const xs = entries.map((e) => e.frame_index_next);
  const ys = entries.flatMap((e) => [e.dx, e.dy]);
  let xMin = view.xMin ?? (xs.length ? Math.min(...xs) : 0);
  let xMax = view.xMax ?? (xs.length ? Math.max(...xs) : 1);
  if (xMin === xMax) {
    xMin -= 1;
    xMax += 1;
  }
  // Always keep the threshold band in view so the dashed lines stay visible.
  const yAbs = Math.max(thresholdPx * 1.2, ...ys.map(Math.abs), 1);
  return {
    x: { domainMin: xMin, domainMax: xMax, rangeMin: MARGIN.left, rangeMax: view.width - MARGIN.right },
    y: { domainMin: -yAbs, domainMax: yAbs, rangeMin: view.height - MARGIN.bottom, rangeMax: MARGIN.top },
  };
}

export interface PlotPoint {
  px: number;
  py: number;
  entry: DeltaEntry;
}

export function seriesPoints(entries: DeltaEntry[], frame: PlotFrame,
                             axis: "dx" | "dy"): PlotPoint[] {
  return entries.map((e) => ({
    px: scaleValue(frame.x, e.frame_index_next),
    py: scaleValue(frame.y, e[axis]),
    entry: e,
  }));
}

export interface Marker {
  id: string;
  px: number;
  py: number;
  frameIndexNext: number;
  dismissed: boolean;
}

// One green marker per reported anomaly, placed on whichever axis tripped
// the threshold (the larger displacement).
export function anomalyMarkers(entries: DeltaEntry[], anomalies: Anomaly[],
                               frame: PlotFrame): Marker[] {
  const byId = new Map(entries.map((e) => [e.id, e]));
  const markers: Marker[] = [];
  for (const a of anomalies) {
    const e = byId.get(a.id) ?? a;
    const worst = Math.abs(e.dx) >= Math.abs(e.dy) ? e.dx : e.dy;
    markers.push({
      id: a.id,
      px: scaleValue(frame.x, e.frame_index_next),
      py: scaleValue(frame.y, worst),
      frameIndexNext: e.frame_index_next,
      dismissed: a.dismissed,
    });
  }
  return markers;
}

// Clicking near a marker navigates to the frame after the jump; clicking
// elsewhere on the plot jumps to the nearest frame index on the x axis.
export function hitTest(markers: Marker[], px: number, py: number,
                        radius = 8): Marker | null {
  let best: Marker | null = null;
  let bestDist = radius;
  for (const m of markers) {
    const d = Math.hypot(m.px - px, m.py - py);
    if (d <= bestDist) {
      best = m;
      bestDist = d;
    }
  }
  return best;
}

export function clickTarget(markers: Marker[], frame: PlotFrame,
                            px: number, py: number): number {
  const hit = hitTest(markers, px, py);
  if (hit !== null) return hit.frameIndexNext;
  return Math.round(invertScale(frame.x, px));
}

export interface EdgeLine {
  frameIndex: number;
  kind: "saccade" | "blink";
}

const SACCADE_EDGES = new Set(["SACCADE_START", "SACCADE_END", "SACCADE_START_END"]);
const BLINK_EDGES = new Set(["BLINK_START", "BLINK_END", "BLINK_START_END"]);

export function edgeLines(annotations: Annotation[]): EdgeLine[] {
  const lines: EdgeLine[] = [];
  for (const a of annotations) {
    if (SACCADE_EDGES.has(a.saccade_state)) {
      lines.push({ frameIndex: a.frame_index, kind: "saccade" });
    }
    if (BLINK_EDGES.has(a.blink_state)) {
      lines.push({ frameIndex: a.frame_index, kind: "blink" });
    }
  }
  return lines;
}

// Drag-to-zoom: a horizontal selection in pixels becomes the new window.
// Selections narrower than a few pixels are treated as clicks, not zooms.
export function zoomWindow(frame: PlotFrame, pxA: number, pxB: number,
                           minDragPx = 5): [number, number] | null {
  if (Math.abs(pxA - pxB) < minDragPx) return null;
  const a = invertScale(frame.x, Math.min(pxA, pxB));
  const b = invertScale(frame.x, Math.max(pxA, pxB));
  return [a, b];
}
