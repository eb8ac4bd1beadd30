"""Accumulate events into fixed 5 ms windows and render polarity frames.

Each pixel keeps separate positive / negative event counts; rendering
collapses them to the usual green/red polarity image on a black background.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .events import EventStream

DEFAULT_WINDOW_US = 5000  # 200 Hz

BACKGROUND = (0, 0, 0)
POSITIVE_COLOR = (0, 255, 0)
NEGATIVE_COLOR = (255, 0, 0)


@dataclass(frozen=True)
class PolarityFrame:
    """Per-pixel polarity counts for one accumulation window."""

    index: int
    t_start_us: int
    t_end_us: int
    pos_counts: np.ndarray  # (height, width) non-negative ints
    neg_counts: np.ndarray

    @property
    def width(self) -> int:
        return self.pos_counts.shape[1]

    @property
    def height(self) -> int:
        return self.pos_counts.shape[0]

    @property
    def total_events(self) -> int:
        return int(self.pos_counts.sum() + self.neg_counts.sum())


def accumulate(stream: EventStream, window_us: int = DEFAULT_WINDOW_US) -> list[PolarityFrame]:
    """Bucket events into consecutive windows of ``window_us`` microseconds.

    Frame ``i`` covers ``[i * window_us, (i + 1) * window_us)``; every event
    lands in exactly one frame and empty windows still produce (all-zero)
    frames so the frame index is a pure function of time.
    """
    if window_us <= 0:
        raise ValueError("window_us must be positive")
    h, w = stream.sensor_height, stream.sensor_width
    n_frames = int(stream.t_last_us // window_us) + 1 if stream.count else 0

    frame_idx = stream.t_us // window_us
    pos = stream.polarity > 0
    shape = (n_frames, h, w)
    pos_grid = np.zeros(shape, dtype=np.int32)
    neg_grid = np.zeros(shape, dtype=np.int32)
    np.add.at(pos_grid, (frame_idx[pos], stream.y[pos], stream.x[pos]), 1)
    np.add.at(neg_grid, (frame_idx[~pos], stream.y[~pos], stream.x[~pos]), 1)

    return [
        PolarityFrame(
            index=i,
            t_start_us=i * window_us,
            t_end_us=(i + 1) * window_us,
            pos_counts=pos_grid[i],
            neg_counts=neg_grid[i],
        )
        for i in range(n_frames)
    ]


def render_rgb(frame: PolarityFrame) -> np.ndarray:
    """Render a frame to an (H, W, 3) uint8 image.

    Majority polarity wins per pixel; ties at equal nonzero counts render
    green.  Deterministic.
    """
    img = np.zeros((frame.height, frame.width, 3), dtype=np.uint8)
    img[:] = BACKGROUND
    green = frame.pos_counts >= frame.neg_counts
    any_event = (frame.pos_counts > 0) | (frame.neg_counts > 0)
    img[any_event & green] = POSITIVE_COLOR
    img[any_event & ~green] = NEGATIVE_COLOR
    return img


def frame_to_png(frame: PolarityFrame, path=None) -> bytes:
    """Export the rendered frame as PNG bytes, optionally writing to a path."""
    img = Image.fromarray(render_rgb(frame))
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    data = buf.getvalue()
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(data)
    return data


def frame_to_sparse_csv(frame: PolarityFrame) -> str:
    """Debug export: `x,y,pos,neg` rows for every pixel with any events."""
    ys, xs = np.nonzero((frame.pos_counts > 0) | (frame.neg_counts > 0))
    lines = ["x,y,pos,neg"]
    for y, x in zip(ys, xs):
        lines.append(f"{x},{y},{frame.pos_counts[y, x]},{frame.neg_counts[y, x]}")
    return "\n".join(lines) + "\n"
