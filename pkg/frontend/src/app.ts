// DOM wiring for the review workstation. All decision logic lives in
// keymap.ts and deltaplot.ts; this file fetches, draws and dispatches.

import { ApiClient, StaleRevisionError } from "./api.js";
import {
  EditorState,
  effectiveBlink,
  effectiveCenter,
  effectiveSaccade,
  freshState,
  handleKey,
  isDirty,
} from "./keymap.js";
import {
  Marker,
  PlotFrame,
  Viewport,
  anomalyMarkers,
  buildPlotFrame,
  clickTarget,
  edgeLines,
  scaleValue,
  seriesPoints,
  visibleEntries,
  zoomWindow,
} from "./deltaplot.js";
import { Annotation, Anomaly, DeltaEntry, Manifest } from "./types.js";

const COLORS = {
  dx: "#2060d0",
  dy: "#d03030",
  saccade: "#8a2be2",
  blink: "#ff8c00",
  anomaly: "#20a040",
  dismissed: "#9fd3ab",
  threshold: "#888888",
};

class ReviewApp {
  private api: ApiClient;
  private manifest!: Manifest;
  private editor!: EditorState;
  private entries: DeltaEntry[] = [];
  private anomalies: Anomaly[] = [];
  private annotations: Annotation[] = [];
  private plotFrame: PlotFrame | null = null;
  private markers: Marker[] = [];
  private view: Viewport;
  private dragStart: number | null = null;
  private thresholdPx = 10;

  private frameImg: HTMLImageElement;
  private canvas: HTMLCanvasElement;
  private statusEl: HTMLElement;
  private infoEl: HTMLElement;

  constructor(api: ApiClient) {
    this.api = api;
    this.frameImg = document.getElementById("frame") as HTMLImageElement;
    this.canvas = document.getElementById("deltaplot") as HTMLCanvasElement;
    this.statusEl = document.getElementById("status") as HTMLElement;
    this.infoEl = document.getElementById("info") as HTMLElement;
    this.view = { width: this.canvas.width, height: this.canvas.height, xMin: null, xMax: null };
  }

  async start(): Promise<void> {
    this.manifest = await this.api.manifest();
    await this.reloadSeries();
    const first = this.entries.length ? this.entries[0].frame_index_prev : 0;
    await this.gotoFrame(first);

    window.addEventListener("keydown", (ev) => void this.onKey(ev));
    this.canvas.addEventListener("mousedown", (ev) => {
      this.dragStart = ev.offsetX;
    });
    this.canvas.addEventListener("mouseup", (ev) => void this.onPlotRelease(ev));
    this.canvas.addEventListener("dblclick", () => {
      this.view.xMin = null;
      this.view.xMax = null;
      this.drawPlot();
    });
  }

  private async reloadSeries(): Promise<void> {
    const [deltas, report, listing] = await Promise.all([
      this.api.deltas(),
      this.api.anomalies(),
      this.api.annotations(),
    ]);
    this.entries = deltas.entries;
    this.anomalies = report.anomalies;
    this.thresholdPx = report.threshold_px;
    this.annotations = listing.annotations;
    this.drawPlot();
  }

  private async gotoFrame(frameIndex: number): Promise<void> {
    const annotation = await this.api.annotation(frameIndex);
    this.editor = freshState(annotation, annotation.revision ?? 0);
    this.frameImg.src = this.api.frameUrl(frameIndex, ["center", "roi"]);
    this.renderInfo();
  }

  private renderInfo(): void {
    const a = this.editor.annotation;
    const center = effectiveCenter(this.editor);
    const parts = [
      `frame ${a.frame_index} / ${this.manifest.frame_count}`,
      `events ${a.event_count}`,
      `center ${center ? center.map((v) => v.toFixed(2)).join(", ") : "none"}`,
      `saccade ${effectiveSaccade(this.editor)}`,
      `blink ${effectiveBlink(this.editor)}`,
      `${a.source}${a.reviewed ? " (reviewed)" : ""}`,
    ];
    this.infoEl.textContent = parts.join("  |  ");
    this.statusEl.textContent = isDirty(this.editor) ? "edited, Enter to save" : "";
  }

  private async onKey(ev: KeyboardEvent): Promise<void> {
    const { state, effect } = handleKey(this.editor, ev.key, ev.shiftKey);
    if (state !== this.editor) {
      ev.preventDefault();
      this.editor = state;
      this.renderInfo();
    }
    if (effect === null) return;
    ev.preventDefault();
    if (effect.kind === "navigate") {
      const target = await this.api.nextFrame(
        this.editor.annotation.frame_index, effect.direction);
      if (target !== null) await this.gotoFrame(target);
      else this.statusEl.textContent = "no further frame above threshold";
    } else {
      try {
        const saved = await this.api.saveAnnotation(effect.frameIndex, effect.patch);
        this.editor = freshState(saved, saved.revision ?? 0);
        await this.reloadSeries();
        this.renderInfo();
        this.statusEl.textContent = "saved";
      } catch (err) {
        if (err instanceof StaleRevisionError) {
          // Someone else saved first; refresh and let the reviewer redo.
          await this.gotoFrame(effect.frameIndex);
          this.statusEl.textContent = "conflict: annotation reloaded";
        } else {
          this.statusEl.textContent = String(err);
        }
      }
    }
  }

  private async onPlotRelease(ev: MouseEvent): Promise<void> {
    if (this.plotFrame === null || this.dragStart === null) return;
    const zoom = zoomWindow(this.plotFrame, this.dragStart, ev.offsetX);
    this.dragStart = null;
    if (zoom !== null) {
      [this.view.xMin, this.view.xMax] = zoom;
      this.drawPlot();
      return;
    }
    const target = clickTarget(this.markers, this.plotFrame, ev.offsetX, ev.offsetY);
    await this.gotoFrame(target);
  }

  private drawPlot(): void {
    const ctx = this.canvas.getContext("2d");
    if (ctx === null) return;
    ctx.clearRect(0, 0, this.view.width, this.view.height);

    const entries = visibleEntries(this.entries, this.view);
    const threshold = this.thresholdPx;
    const frame = buildPlotFrame(entries, this.view, threshold);
    this.plotFrame = frame;

    for (const line of edgeLines(this.annotations)) {
      const px = scaleValue(frame.x, line.frameIndex);
      if (px < frame.x.rangeMin || px > frame.x.rangeMax) continue;
      ctx.strokeStyle = line.kind === "saccade" ? COLORS.saccade : COLORS.blink;
      ctx.beginPath();
      ctx.moveTo(px, frame.y.rangeMax);
      ctx.lineTo(px, frame.y.rangeMin);
      ctx.stroke();
    }

    ctx.strokeStyle = COLORS.threshold;
    ctx.setLineDash([4, 4]);
    for (const v of [threshold, -threshold]) {
      const py = scaleValue(frame.y, v);
      ctx.beginPath();
      ctx.moveTo(frame.x.rangeMin, py);
      ctx.lineTo(frame.x.rangeMax, py);
      ctx.stroke();
    }
    ctx.setLineDash([]);

    for (const axis of ["dx", "dy"] as const) {
      ctx.strokeStyle = COLORS[axis];
      ctx.beginPath();
      seriesPoints(entries, frame, axis).forEach((p, i) => {
        if (i === 0) ctx.moveTo(p.px, p.py);
        else ctx.lineTo(p.px, p.py);
      });
      ctx.stroke();
    }

    this.markers = anomalyMarkers(entries, this.anomalies, frame)
      .filter((m) => m.px >= frame.x.rangeMin && m.px <= frame.x.rangeMax);
    for (const m of this.markers) {
      ctx.fillStyle = m.dismissed ? COLORS.dismissed : COLORS.anomaly;
      ctx.beginPath();
      ctx.arc(m.px, m.py, 4, 0, 2 * Math.PI);
      ctx.fill();
    }
  }
}

const app = new ReviewApp(new ApiClient(""));
void app.start();
