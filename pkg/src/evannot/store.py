"""Per-frame annotation records: persistence, human corrections and stats.

Annotations live in a CSV with columns
``frame_index,t_start_us,event_count,center_x,center_y,saccade_state,blink_state,source,reviewed``.
Centers are serialized with 2 decimal places (exact round-trip at that
precision).  Human corrections go through :meth:`AnnotationStore.apply_correction`,
which appends to an in-memory audit log (JSON-lines on disk).
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional

from .errors import DuplicateFrameIndex, InvalidPatch, MalformedRow, UnknownFrame
from .saccades import SaccadeState, count_saccade_runs

CSV_COLUMNS = [
    "frame_index",
    "t_start_us",
    "event_count",
    "center_x",
    "center_y",
    "saccade_state",
    "blink_state",
    "source",
    "reviewed",
]

DEFAULT_MIN_EVENT_THRESHOLD = 30


class BlinkState(str, Enum):
    NONE = "NONE"
    BLINK_START = "BLINK_START"
    BLINK_IN_PROGRESS = "BLINK_IN_PROGRESS"
    BLINK_END = "BLINK_END"
    BLINK_START_END = "BLINK_START_END"

    @property
    def active(self) -> bool:
        return self is not BlinkState.NONE


class Source(str, Enum):
    AUTO = "AUTO"
    HUMAN = "HUMAN"


@dataclass(frozen=True)
class FrameAnnotation:
    frame_index: int
    t_start_us: int
    event_count: int
    center: Optional[tuple[float, float]] = None
    saccade_state: SaccadeState = SaccadeState.NONE
    blink_state: BlinkState = BlinkState.NONE
    source: Source = Source.AUTO
    reviewed: bool = False

    def __post_init__(self):
        if self.source is Source.HUMAN and not self.reviewed:
            raise ValueError("HUMAN-sourced annotations must be marked reviewed")

    def as_dict(self) -> dict:
        return {
            "frame_index": self.frame_index,
            "t_start_us": self.t_start_us,
            "event_count": self.event_count,
            "center_x": None if self.center is None else round(self.center[0], 2),
            "center_y": None if self.center is None else round(self.center[1], 2),
            "saccade_state": self.saccade_state.value,
            "blink_state": self.blink_state.value,
            "source": self.source.value,
            "reviewed": self.reviewed,
        }


@dataclass
class DatasetStats:
    frames_analyzed: int = 0
    annotated_frames: int = 0
    saccade_count: int = 0
    blink_count: int = 0
    eye_center_positions: int = 0

    def __add__(self, other: "DatasetStats") -> "DatasetStats":
        return DatasetStats(
            self.frames_analyzed + other.frames_analyzed,
            self.annotated_frames + other.annotated_frames,
            self.saccade_count + other.saccade_count,
            self.blink_count + other.blink_count,
            self.eye_center_positions + other.eye_center_positions,
        )

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _fmt_center(v: Optional[float]) -> str:
    return "" if v is None else f"{v:.2f}"


def save_annotations(annotations: Iterable[FrameAnnotation], sink=None) -> Optional[str]:
    """Serialize annotations (sorted by frame_index) to CSV."""
    annotations = list(annotations)
    indices = [a.frame_index for a in annotations]
    if indices != sorted(indices):
        raise ValueError("annotations must be sorted by frame_index")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for a in annotations:
        cx, cy = (a.center if a.center is not None else (None, None))
        writer.writerow([
            a.frame_index,
            a.t_start_us,
            a.event_count,
            _fmt_center(cx),
            _fmt_center(cy),
            a.saccade_state.value,
            a.blink_state.value,
            a.source.value,
            "true" if a.reviewed else "false",
        ])
    text = buf.getvalue()
    if sink is None:
        return text
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return None


def load_annotations(source) -> list[FrameAnnotation]:
    """Parse an annotation CSV; raises MalformedRow / DuplicateFrameIndex."""
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, str) and "\n" in source:
        text = source
    else:
        with open(source, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()

    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or rows[0] != CSV_COLUMNS:
        raise MalformedRow(1, "missing or wrong header")

    annotations = []
    seen = set()
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(CSV_COLUMNS):
            raise MalformedRow(line_no, f"expected {len(CSV_COLUMNS)} fields, got {len(row)}")
        try:
            frame_index = int(row[0])
            t_start_us = int(row[1])
            event_count = int(row[2])
            cx = float(row[3]) if row[3] != "" else None
            cy = float(row[4]) if row[4] != "" else None
            saccade = SaccadeState(row[5])
            blink = BlinkState(row[6])
            source_ = Source(row[7])
            reviewed = {"true": True, "false": False}[row[8]]
        except (ValueError, KeyError) as exc:
            raise MalformedRow(line_no, str(exc)) from None
        if (cx is None) != (cy is None):
            raise MalformedRow(line_no, "center must have both or neither coordinate")
        if frame_index in seen:
            raise DuplicateFrameIndex(frame_index)
        seen.add(frame_index)
        annotations.append(FrameAnnotation(
            frame_index=frame_index,
            t_start_us=t_start_us,
            event_count=event_count,
            center=None if cx is None else (cx, cy),
            saccade_state=saccade,
            blink_state=blink,
            source=source_,
            reviewed=reviewed,
        ))
    return annotations


@dataclass
class AuditEntry:
    timestamp: float
    frame_index: int
    field: str
    old: object
    new: object

    def as_dict(self) -> dict:
        return dict(self.__dict__)


MUTABLE_FIELDS = ("center", "saccade_state", "blink_state")


class AnnotationStore:
    """Single-writer store of per-frame annotations with an audit log.

    ``revision`` increments on every successful correction and backs the
    review service's optimistic concurrency tokens.
    """

    def __init__(self, annotations: Iterable[FrameAnnotation],
                 sensor_width: int = 346, sensor_height: int = 260):
        self._records: dict[int, FrameAnnotation] = {}
        for a in annotations:
            if a.frame_index in self._records:
                raise DuplicateFrameIndex(a.frame_index)
            self._records[a.frame_index] = a
        self.sensor_width = sensor_width
        self.sensor_height = sensor_height
        self.audit_log: list[AuditEntry] = []
        self.dismissed_anomalies: set[str] = set()
        self.revision = 0

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, frame_index: int) -> bool:
        return frame_index in self._records

    def get(self, frame_index: int) -> FrameAnnotation:
        try:
            return self._records[frame_index]
        except KeyError:
            raise UnknownFrame(frame_index) from None

    def annotations(self) -> list[FrameAnnotation]:
        return [self._records[i] for i in sorted(self._records)]

    def apply_correction(self, frame_index: int, patch: dict,
                         timestamp: Optional[float] = None) -> FrameAnnotation:
        """Apply a partial human edit; only the patched fields change.

        The record becomes HUMAN-sourced and reviewed, and one audit entry
        is appended per changed field.
        """
        record = self.get(frame_index)
        unknown = set(patch) - set(MUTABLE_FIELDS)
        if unknown:
            raise InvalidPatch(f"unknown fields: {sorted(unknown)}")
        changes = {}
        if "center" in patch:
            center = patch["center"]
            if center is not None:
                try:
                    cx, cy = float(center[0]), float(center[1])
                except (TypeError, ValueError, IndexError):
                    raise InvalidPatch(f"bad center {center!r}") from None
                if not (0 <= cx < self.sensor_width and 0 <= cy < self.sensor_height):
                    raise InvalidPatch(f"center ({cx}, {cy}) out of sensor bounds")
                center = (cx, cy)
            changes["center"] = center
        if "saccade_state" in patch:
            try:
                changes["saccade_state"] = SaccadeState(patch["saccade_state"])
            except ValueError:
                raise InvalidPatch(f"bad saccade_state {patch['saccade_state']!r}") from None
        if "blink_state" in patch:
            try:
                changes["blink_state"] = BlinkState(patch["blink_state"])
            except ValueError:
                raise InvalidPatch(f"bad blink_state {patch['blink_state']!r}") from None

        ts = time.time() if timestamp is None else timestamp
        updated = replace(record, source=Source.HUMAN, reviewed=True, **changes)
        for name, new_value in changes.items():
            old_value = getattr(record, name)
            self.audit_log.append(AuditEntry(
                timestamp=ts,
                frame_index=frame_index,
                field=name,
                old=_jsonable(old_value),
                new=_jsonable(new_value),
            ))
        self._records[frame_index] = updated
        self.revision += 1
        return updated

    def save_audit_log(self, sink) -> None:
        lines = [json.dumps(e.as_dict()) for e in self.audit_log]
        text = "\n".join(lines) + ("\n" if lines else "")
        if hasattr(sink, "write"):
            sink.write(text)
        else:
            with open(sink, "w", encoding="utf-8") as fh:
                fh.write(text)


def _jsonable(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, tuple):
        return list(value)
    return value


def load_audit_log(source) -> list[AuditEntry]:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    entries = []
    for line in text.splitlines():
        if line.strip():
            entries.append(AuditEntry(**json.loads(line)))
    return entries


def replay_audit(base_annotations: Iterable[FrameAnnotation],
                 entries: Iterable[AuditEntry],
                 sensor_width: int = 346, sensor_height: int = 260) -> AnnotationStore:
    """Re-apply audited edits over the original AUTO annotations."""
    store = AnnotationStore(base_annotations, sensor_width, sensor_height)
    for e in entries:
        value = e.new
        if e.field == "center" and value is not None:
            value = tuple(value)
        store.apply_correction(e.frame_index, {e.field: value}, timestamp=e.timestamp)
    return store


def _has_any_label(a: FrameAnnotation) -> bool:
    return (
        a.center is not None
        or a.saccade_state is not SaccadeState.NONE
        or a.blink_state is not BlinkState.NONE
        or a.reviewed
    )


def compute_stats(annotations: Iterable[FrameAnnotation],
                  min_event_threshold: int = DEFAULT_MIN_EVENT_THRESHOLD) -> DatasetStats:
    """Dataset accounting over one user's annotations.

    An "annotated frame" is one whose event count exceeds the per-user
    threshold and that carries any label (center, non-NONE state, or a
    review mark).  Saccade/blink counts are run counts: START plus
    single-frame START_END labels.
    """
    annotations = sorted(annotations, key=lambda a: a.frame_index)
    saccade_seq = [a.saccade_state for a in annotations]
    blink_seq = [a.blink_state for a in annotations]
    return DatasetStats(
        frames_analyzed=len(annotations),
        annotated_frames=sum(
            1 for a in annotations
            if a.event_count > min_event_threshold and _has_any_label(a)
        ),
        saccade_count=count_saccade_runs(saccade_seq),
        blink_count=sum(
            1 for b in blink_seq
            if b in (BlinkState.BLINK_START, BlinkState.BLINK_START_END)
        ),
        eye_center_positions=sum(1 for a in annotations if a.center is not None),
    )


def compute_stats_by_user(user_annotations: dict[str, list[FrameAnnotation]],
                          thresholds: Optional[dict[str, int]] = None) -> dict[str, DatasetStats]:
    """Per-user stats plus a field-wise 'Total' row."""
    thresholds = thresholds or {}
    out: dict[str, DatasetStats] = {}
    total = DatasetStats()
    for user, annotations in user_annotations.items():
        stats = compute_stats(annotations, thresholds.get(user, DEFAULT_MIN_EVENT_THRESHOLD))
        out[user] = stats
        total = total + stats
    out["Total"] = total
    return out
