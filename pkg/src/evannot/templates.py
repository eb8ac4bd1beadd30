"""Directional template matching for the tentative pupil center.

A moving pupil leaves positive events on its leading edge and negative
events on its trailing edge.  Each of the 8 compass directions gets a pair
of zero-mean arc kernels (leading arc / trailing arc of a circle with the
expected pupil radius).  The positive-count channel is correlated with the
leading kernel, the negative-count channel with the trailing kernel, both
response maps are clamped at zero and multiplied elementwise; the global
maximum over the 8 heatmaps gives direction, tentative center and ROI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, NoSignal
from .frames import PolarityFrame

# Image coordinates: x grows right, y grows down, so N points to -y.
DIRECTIONS = {
    "E": (1.0, 0.0),
    "NE": (1.0 / math.sqrt(2), -1.0 / math.sqrt(2)),
    "N": (0.0, -1.0),
    "NW": (-1.0 / math.sqrt(2), -1.0 / math.sqrt(2)),
    "W": (-1.0, 0.0),
    "SW": (-1.0 / math.sqrt(2), 1.0 / math.sqrt(2)),
    "S": (0.0, 1.0),
    "SE": (1.0 / math.sqrt(2), 1.0 / math.sqrt(2)),
}
DIRECTION_ORDER = ["E", "NE", "N", "NW", "W", "SW", "S", "SE"]


@dataclass
class TemplateConfig:
    pupil_radius_px: int = 10
    kernel_size: int = 31
    ring_halfwidth_px: float = 1.5
    arc_half_angle_deg: float = 67.5
    roi_width: int = 64
    roi_height: int = 64
    # Calibrated on seeded salt-and-pepper noise frames (500 events on a
    # 346x260 sensor): noise peaks stay below ~10 while real pupil arcs
    # score in the thousands.  See the Monte-Carlo test for the run.
    min_score: float = 25.0


@dataclass(frozen=True)
class DirectionalTemplate:
    direction: str
    leading: np.ndarray  # zero-mean kernel for the positive channel
    trailing: np.ndarray  # zero-mean kernel for the negative channel

    @property
    def combined(self) -> np.ndarray:
        return self.leading - self.trailing


@dataclass(frozen=True)
class TemplateBank:
    templates: tuple[DirectionalTemplate, ...]
    kernel_size: int

    def __getitem__(self, direction: str) -> DirectionalTemplate:
        for t in self.templates:
            if t.direction == direction:
                return t
        raise KeyError(direction)


@dataclass(frozen=True)
class RoiBox:
    x0: int
    y0: int
    width: int
    height: int

    @property
    def center(self) -> tuple[int, int]:
        return (self.x0 + self.width // 2, self.y0 + self.height // 2)


@dataclass(frozen=True)
class MatchResult:
    tentative_center: tuple[int, int]
    direction: str
    score: float
    roi: RoiBox


def build_default_templates(config: TemplateConfig | None = None) -> TemplateBank:
    """Construct the 8 directional arc-kernel pairs."""
    config = config or TemplateConfig()
    ks = config.kernel_size
    r = config.pupil_radius_px
    if ks < 2 * r:
        raise InvalidConfig(f"kernel_size {ks} too small for pupil radius {r}")

    c = ks // 2
    dy, dx = np.mgrid[0:ks, 0:ks] - c
    dist = np.hypot(dx, dy)
    on_ring = np.abs(dist - r) <= config.ring_halfwidth_px
    cos_cut = math.cos(math.radians(config.arc_half_angle_deg))

    templates = []
    for name in DIRECTION_ORDER:
        ux, uy = DIRECTIONS[name]
        with np.errstate(invalid="ignore", divide="ignore"):
            cos_angle = np.where(dist > 0, (dx * ux + dy * uy) / np.where(dist > 0, dist, 1), 0.0)
        leading = (on_ring & (cos_angle >= cos_cut)).astype(np.float64)
        trailing = (on_ring & (cos_angle <= -cos_cut)).astype(np.float64)
        leading -= leading.mean()
        trailing -= trailing.mean()
        templates.append(DirectionalTemplate(name, leading, trailing))
    return TemplateBank(tuple(templates), ks)


def sparse_correlate(counts: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Exact spatial cross-correlation exploiting frame sparsity.

    Equivalent to dense correlation with zero padding, but cost scales with
    the number of active pixels instead of the sensor area.  Pure spatial
    sums, so integer shifts of the input shift the output bitwise.
    """
    h, w = counts.shape
    ks = kernel.shape[0]
    c = ks // 2
    flipped = kernel[::-1, ::-1]
    acc = np.zeros((h + 2 * c, w + 2 * c), dtype=np.float64)
    ys, xs = np.nonzero(counts)
    vals = counts[ys, xs].astype(np.float64)
    for y, x, v in zip(ys, xs, vals):
        acc[y : y + ks, x : x + ks] += v * flipped
    return acc[c : c + h, c : c + w]


def direction_heatmap(frame: PolarityFrame, template: DirectionalTemplate) -> np.ndarray:
    """Heatmap for one direction: clamped leading/trailing responses multiplied."""
    rp = np.maximum(sparse_correlate(frame.pos_counts, template.leading), 0.0)
    rn = np.maximum(sparse_correlate(frame.neg_counts, template.trailing), 0.0)
    return rp * rn


def clamp_roi(cx: int, cy: int, roi_w: int, roi_h: int, width: int, height: int) -> RoiBox:
    roi_w = min(roi_w, width)
    roi_h = min(roi_h, height)
    x0 = int(np.clip(cx - roi_w // 2, 0, width - roi_w))
    y0 = int(np.clip(cy - roi_h // 2, 0, height - roi_h))
    return RoiBox(x0, y0, roi_w, roi_h)


def match_pupil(frame: PolarityFrame, bank: TemplateBank,
                config: TemplateConfig | None = None) -> MatchResult:
    """Find the tentative pupil center and motion direction on one frame.

    Raises :class:`NoSignal` when the frame is empty or the best heatmap
    peak falls below ``config.min_score``.
    """
    config = config or TemplateConfig()
    if frame.total_events == 0:
        raise NoSignal("empty frame")

    best = None  # (score, direction, cy, cx)
    for template in bank.templates:
        heat = direction_heatmap(frame, template)
        flat = int(np.argmax(heat))
        cy, cx = np.unravel_index(flat, heat.shape)
        score = float(heat[cy, cx])
        if best is None or score > best[0]:
            best = (score, template.direction, int(cy), int(cx))

    score, direction, cy, cx = best
    if score < config.min_score:
        raise NoSignal(f"best heatmap score {score:.2f} below {config.min_score}")
    roi = clamp_roi(cx, cy, config.roi_width, config.roi_height, frame.width, frame.height)
    return MatchResult(tentative_center=(cx, cy), direction=direction, score=score, roi=roi)


def roi_points(frame: PolarityFrame, roi: RoiBox) -> np.ndarray:
    """Coordinates (x, y) of all pixels inside the ROI with any events.

    Each active pixel contributes once regardless of its event count.
    """
    sub_pos = frame.pos_counts[roi.y0 : roi.y0 + roi.height, roi.x0 : roi.x0 + roi.width]
    sub_neg = frame.neg_counts[roi.y0 : roi.y0 + roi.height, roi.x0 : roi.x0 + roi.width]
    ys, xs = np.nonzero((sub_pos > 0) | (sub_neg > 0))
    return np.column_stack([xs + roi.x0, ys + roi.y0]).astype(np.float64)
