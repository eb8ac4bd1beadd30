"""Inter-frame displacement deltas and anomaly flagging for review triage.

Consecutive annotated centers give (dx, dy) entries; an entry is anomalous
when it moves more than the reviewer threshold in a single 200 Hz step.
The report is paired with a static plot mirroring the interactive review
figure: dx/dy traces, saccade and blink run edges, anomaly markers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .saccades import SaccadeState
from .store import BlinkState, FrameAnnotation

DEFAULT_THRESHOLD_PX = 10.0


@dataclass(frozen=True)
class DeltaEntry:
    frame_index_prev: int
    frame_index_next: int
    dx: float
    dy: float
    gap_frames: int

    @property
    def id(self) -> str:
        return f"{self.frame_index_prev}-{self.frame_index_next}"

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "frame_index_prev": self.frame_index_prev,
            "frame_index_next": self.frame_index_next,
            "dx": self.dx,
            "dy": self.dy,
            "gap_frames": self.gap_frames,
        }


@dataclass
class DeltaSeries:
    entries: list[DeltaEntry]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass
class AnomalyReport:
    anomalies: list[DeltaEntry]
    threshold_px: float

    def as_dict(self) -> dict:
        return {
            "threshold_px": self.threshold_px,
            "anomalies": [e.as_dict() for e in self.anomalies],
        }


def compute_deltas(annotations: Iterable[FrameAnnotation]) -> DeltaSeries:
    """One entry per adjacent pair of annotations that both carry centers."""
    with_centers = [a for a in sorted(annotations, key=lambda a: a.frame_index)
                    if a.center is not None]
    entries = []
    for prev, nxt in zip(with_centers, with_centers[1:]):
        entries.append(DeltaEntry(
            frame_index_prev=prev.frame_index,
            frame_index_next=nxt.frame_index,
            dx=nxt.center[0] - prev.center[0],
            dy=nxt.center[1] - prev.center[1],
            gap_frames=nxt.frame_index - prev.frame_index,
        ))
    return DeltaSeries(entries)


def violation(entry: DeltaEntry, threshold_px: float,
              metric: str = "per_axis", scale_by_gap: bool = False) -> bool:
    limit = threshold_px * entry.gap_frames if scale_by_gap else threshold_px
    if metric == "euclidean":
        return (entry.dx**2 + entry.dy**2) ** 0.5 > limit
    return max(abs(entry.dx), abs(entry.dy)) > limit


def find_anomalies(deltas: DeltaSeries, threshold_px: float = DEFAULT_THRESHOLD_PX,
                   metric: str = "per_axis", scale_by_gap: bool = False) -> AnomalyReport:
    """Exactly the entries whose displacement exceeds the threshold, in order."""
    if threshold_px <= 0:
        raise ValueError("threshold_px must be positive")
    if metric not in ("per_axis", "euclidean"):
        raise ValueError(f"unknown metric {metric!r}")
    anomalies = [e for e in deltas if violation(e, threshold_px, metric, scale_by_gap)]
    return AnomalyReport(anomalies=anomalies, threshold_px=threshold_px)


def _run_edges(annotations, start_states, end_states):
    """Frame indices of run rising and falling edges for state overlays."""
    rising, falling = [], []
    for a in annotations:
        state = a[1]
        if state in start_states:
            rising.append(a[0])
        if state in end_states:
            falling.append(a[0])
    return rising, falling


def plot_deltas(annotations: Iterable[FrameAnnotation], deltas: DeltaSeries,
                report: AnomalyReport, path=None, figsize=(12, 5)):
    """Static review plot: dx (blue) / dy (red) traces, saccade edges in
    violet, blink edges in orange, anomalies marked green."""
    annotations = sorted(annotations, key=lambda a: a.frame_index)
    frames = [e.frame_index_next for e in deltas]
    dxs = [e.dx for e in deltas]
    dys = [e.dy for e in deltas]

    fig, ax = plt.subplots(figsize=figsize)
    ax.plot(frames, dxs, color="tab:blue", linewidth=0.8, label="dx")
    ax.plot(frames, dys, color="tab:red", linewidth=0.8, label="dy")

    sac = [(a.frame_index, a.saccade_state) for a in annotations]
    blk = [(a.frame_index, a.blink_state) for a in annotations]
    sac_rise, sac_fall = _run_edges(
        sac,
        (SaccadeState.SACCADE_START, SaccadeState.SACCADE_START_END),
        (SaccadeState.SACCADE_END, SaccadeState.SACCADE_START_END),
    )
    blk_rise, blk_fall = _run_edges(
        blk,
        (BlinkState.BLINK_START, BlinkState.BLINK_START_END),
        (BlinkState.BLINK_END, BlinkState.BLINK_START_END),
    )
    for i in sac_rise + sac_fall:
        ax.axvline(i, color="violet", alpha=0.5, linewidth=0.8)
    for i in blk_rise + blk_fall:
        ax.axvline(i, color="orange", alpha=0.5, linewidth=0.8)

    if report.anomalies:
        ax.scatter(
            [e.frame_index_next for e in report.anomalies],
            [max(e.dx, e.dy, key=abs) for e in report.anomalies],
            color="green", marker="o", s=30, zorder=3, label="anomaly",
        )
    ax.axhline(report.threshold_px, color="gray", linestyle="--", linewidth=0.6)
    ax.axhline(-report.threshold_px, color="gray", linestyle="--", linewidth=0.6)
    ax.set_xlabel("frame index")
    ax.set_ylabel("delta (px)")
    ax.legend(loc="upper right")
    fig.tight_layout()
    if path is not None:
        fig.savefig(path, dpi=120)
        plt.close(fig)
        return None
    return fig
