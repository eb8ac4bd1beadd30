"""HTTP backend for the human review stage.

Serves frames (PNG with optional overlays), annotations, deltas, anomalies
and dataset statistics, and accepts corrections through the annotation
store's single-writer path guarded by optimistic revision tokens.
"""

from __future__ import annotations

import io
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from PIL import Image, ImageDraw

from .anomalies import compute_deltas, find_anomalies
from .errors import InvalidPatch, UnknownFrame
from .events import IngestConfig, parse_events
from .frames import accumulate, render_rgb
from .pipeline import PipelineConfig
from .store import (
    AnnotationStore,
    compute_stats,
    load_annotations,
    save_annotations,
)


@dataclass
class ReviewSession:
    """Loaded recording + annotation store behind the service."""

    recording_id: str
    store: AnnotationStore
    frames: list
    config: PipelineConfig = field(default_factory=PipelineConfig)
    annotation_path: Optional[Path] = None
    audit_path: Optional[Path] = None
    dismissed_path: Optional[Path] = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    @classmethod
    def open(cls, events_path, annotations_path, config: Optional[PipelineConfig] = None,
             ingest: Optional[IngestConfig] = None) -> "ReviewSession":
        config = config or PipelineConfig()
        stream = parse_events(events_path, ingest)
        frames = accumulate(stream, config.window_us)
        store = AnnotationStore(
            load_annotations(annotations_path),
            sensor_width=stream.sensor_width,
            sensor_height=stream.sensor_height,
        )
        annotations_path = Path(annotations_path)
        session = cls(
            recording_id=Path(events_path).stem,
            store=store,
            frames=frames,
            config=config,
            annotation_path=annotations_path,
            audit_path=annotations_path.with_suffix(".audit.jsonl"),
            dismissed_path=annotations_path.with_suffix(".dismissed.json"),
        )
        if session.dismissed_path.exists():
            store.dismissed_anomalies.update(json.loads(session.dismissed_path.read_text()))
        return session

    def persist(self) -> None:
        if self.annotation_path is not None:
            save_annotations(self.store.annotations(), self.annotation_path)
        if self.audit_path is not None:
            self.store.save_audit_log(self.audit_path)
        if self.dismissed_path is not None:
            self.dismissed_path.write_text(json.dumps(sorted(self.store.dismissed_anomalies)))


def _annotation_json(session: ReviewSession, frame_index: int) -> dict:
    record = session.store.get(frame_index).as_dict()
    record["revision"] = session.store.revision
    return record


def _draw_overlays(img: Image.Image, record, overlays: set[str],
                   roi_w: int, roi_h: int) -> None:
    if record.center is None:
        return
    cx, cy = record.center
    draw = ImageDraw.Draw(img)
    if "center" in overlays:
        r = 6
        draw.line([(cx - r, cy), (cx + r, cy)], fill=(255, 255, 0), width=1)
        draw.line([(cx, cy - r), (cx, cy + r)], fill=(255, 255, 0), width=1)
    if "roi" in overlays:
        draw.rectangle(
            [cx - roi_w // 2, cy - roi_h // 2, cx + roi_w // 2, cy + roi_h // 2],
            outline=(0, 160, 255),
        )
    if "ellipse" in overlays:
        # Only the center survives persistence; draw the nominal pupil circle.
        r = 10
        draw.ellipse([cx - r, cy - r, cx + r, cy + r], outline=(255, 0, 255))


def create_app(session: ReviewSession, static_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="evannot review service")
    store = session.store

    @app.exception_handler(UnknownFrame)
    async def _unknown_frame(request: Request, exc: UnknownFrame):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(InvalidPatch)
    async def _invalid_patch(request: Request, exc: InvalidPatch):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/manifest")
    def manifest():
        return {
            "recording_id": session.recording_id,
            "frame_count": len(session.frames),
            "window_us": session.config.window_us,
            "sensor_width": store.sensor_width,
            "sensor_height": store.sensor_height,
            "min_event_threshold": session.config.min_event_threshold,
            "annotation_file": str(session.annotation_path or ""),
            "revision": store.revision,
        }

    def _frame(i: int):
        if not (0 <= i < len(session.frames)):
            raise UnknownFrame(i)
        return session.frames[i]

    @app.get("/frames/{i}.png")
    def frame_png(i: int, overlay: str = ""):
        frame = _frame(i)
        img = Image.fromarray(render_rgb(frame))
        overlays = {o for o in overlay.split(",") if o}
        if overlays and i in store:
            _draw_overlays(img, store.get(i), overlays,
                           session.config.template.roi_width,
                           session.config.template.roi_height)
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png")

    @app.get("/frames/{i}/events")
    def frame_events(i: int):
        frame = _frame(i)
        import numpy as np

        ys, xs = np.nonzero((frame.pos_counts > 0) | (frame.neg_counts > 0))
        return {
            "frame_index": i,
            "t_start_us": frame.t_start_us,
            "total_events": frame.total_events,
            "pixels": [
                {"x": int(x), "y": int(y),
                 "pos": int(frame.pos_counts[y, x]), "neg": int(frame.neg_counts[y, x])}
                for y, x in zip(ys, xs)
            ],
        }

    @app.get("/frames/next")
    def next_frame(from_index: int = Query(...), threshold: Optional[int] = None,
                   direction: int = 1):
        # Navigation per the review flow: next frame whose event count
        # exceeds the per-user threshold.
        thr = session.config.min_event_threshold if threshold is None else threshold
        step = 1 if direction >= 0 else -1
        i = from_index + step
        while 0 <= i < len(session.frames):
            if session.frames[i].total_events > thr:
                return {"frame_index": i}
            i += step
        raise HTTPException(status_code=404, detail="no further frame above threshold")

    @app.get("/annotations/{i}")
    def get_annotation(i: int):
        return _annotation_json(session, i)

    @app.put("/annotations/{i}")
    async def put_annotation(i: int, request: Request):
        body = await request.json()
        revision = body.get("revision")
        patch = {k: v for k, v in body.items() if k != "revision"}
        if "center" in patch and patch["center"] is not None:
            patch["center"] = tuple(patch["center"])
        with session.lock:
            if revision != store.revision:
                raise HTTPException(status_code=409,
                                    detail=f"stale revision {revision}, current {store.revision}")
            store.apply_correction(i, patch)
            session.persist()
        return _annotation_json(session, i)

    @app.get("/annotations")
    def list_annotations(from_: Optional[int] = Query(None, alias="from"),
                         to: Optional[int] = Query(None)):
        records = store.annotations()
        if from_ is not None:
            records = [a for a in records if a.frame_index >= from_]
        if to is not None:
            records = [a for a in records if a.frame_index <= to]
        return {"revision": store.revision, "annotations": [a.as_dict() for a in records]}

    @app.get("/deltas")
    def deltas():
        series = compute_deltas(store.annotations())
        return {"entries": [e.as_dict() for e in series]}

    @app.get("/anomalies")
    def anomalies(threshold: Optional[float] = None, metric: str = "per_axis"):
        thr = session.config.anomaly_threshold_px if threshold is None else threshold
        series = compute_deltas(store.annotations())
        report = find_anomalies(series, thr, metric=metric)
        body = report.as_dict()
        for entry in body["anomalies"]:
            entry["dismissed"] = entry["id"] in store.dismissed_anomalies
        return body

    @app.post("/anomalies/{anomaly_id}/dismiss")
    def dismiss(anomaly_id: str):
        with session.lock:
            store.dismissed_anomalies.add(anomaly_id)
            session.persist()
        return {"dismissed": sorted(store.dismissed_anomalies)}

    @app.get("/stats")
    def stats():
        return compute_stats(store.annotations(), session.config.min_event_threshold).as_dict()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def default_static_dir() -> Optional[Path]:
    """The built review UI, when the frontend has been compiled."""
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if candidate.is_dir() else None
