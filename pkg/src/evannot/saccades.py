"""Frame-level saccade labeling from per-frame event counts.

A frame is "active" when its event count strictly exceeds the threshold.
Runs of active frames become START / IN_PROGRESS / END labels; a run of
length one gets the dedicated START_END label so both edges stay
recoverable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

DEFAULT_EVENT_THRESHOLD = 150


class SaccadeState(str, Enum):
    NONE = "NONE"
    SACCADE_START = "SACCADE_START"
    SACCADE_IN_PROGRESS = "SACCADE_IN_PROGRESS"
    SACCADE_END = "SACCADE_END"
    SACCADE_START_END = "SACCADE_START_END"

    @property
    def active(self) -> bool:
        return self is not SaccadeState.NONE


@dataclass
class DetectorConfig:
    event_threshold: int = DEFAULT_EVENT_THRESHOLD

    def __post_init__(self):
        if self.event_threshold <= 0:
            raise ValueError("event_threshold must be positive")


def label_counts(counts: Sequence[int], threshold: int = DEFAULT_EVENT_THRESHOLD) -> list[SaccadeState]:
    """Label a raw event-count sequence with saccade states."""
    active = [c > threshold for c in counts]
    n = len(active)
    states = [SaccadeState.NONE] * n
    i = 0
    while i < n:
        if not active[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and active[j + 1]:
            j += 1
        if i == j:
            states[i] = SaccadeState.SACCADE_START_END
        else:
            states[i] = SaccadeState.SACCADE_START
            states[j] = SaccadeState.SACCADE_END
            for k in range(i + 1, j):
                states[k] = SaccadeState.SACCADE_IN_PROGRESS
        i = j + 1
    return states


def detect_saccades(frames, config: DetectorConfig | None = None) -> list[SaccadeState]:
    """Label a sequence of polarity frames (ordered by index)."""
    config = config or DetectorConfig()
    return label_counts([f.total_events for f in frames], config.event_threshold)


def count_saccade_runs(states: Sequence[SaccadeState]) -> int:
    """Number of saccades = START labels plus single-frame START_END labels."""
    return sum(
        1 for s in states if s in (SaccadeState.SACCADE_START, SaccadeState.SACCADE_START_END)
    )
