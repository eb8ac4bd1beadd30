"""Synthetic event recordings with known pupil trajectories.

A circular pupil executes scripted linear saccades; while it moves it emits
positive events along its leading edge and negative events along its
trailing edge, on top of uniform salt-and-pepper sensor noise.  The scripts
carry the ground truth (per-frame center and compass direction), which
makes these recordings the oracle for the matcher, the RANSAC stage and
the end-to-end pipeline tests.

This is a test fixture and demo-data generator, not part of the annotation
method itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .events import EventStream, stream_from_arrays
from .frames import DEFAULT_WINDOW_US, PolarityFrame
from .templates import DIRECTIONS


@dataclass
class SaccadeScript:
    """One linear pupil movement, in frame units."""

    start_frame: int
    end_frame: int  # inclusive; all frames in [start, end] are moving
    from_xy: tuple[float, float]
    to_xy: tuple[float, float]


@dataclass
class SimulationConfig:
    width: int = 346
    height: int = 260
    n_frames: int = 100
    window_us: int = DEFAULT_WINDOW_US
    pupil_radius_px: float = 10.0
    ring_halfwidth_px: float = 1.2
    arc_half_angle_deg: float = 60.0
    emit_prob: float = 0.9
    # Fast edges fire several events per pixel inside one 5 ms window; this
    # also keeps moving frames above the 150-event saccade threshold.
    events_per_arc_point: int = 5
    radial_jitter_px: float = 0.25
    noise_events_per_frame: float = 25.0
    seed: int = 0


@dataclass
class GroundTruth:
    """Per-frame truth: center and compass direction while moving, else None."""

    centers: dict[int, tuple[float, float]] = field(default_factory=dict)
    directions: dict[int, str] = field(default_factory=dict)

    @property
    def moving_frames(self) -> list[int]:
        return sorted(self.centers)


def nearest_compass(dx: float, dy: float) -> str:
    """Closest of the 8 compass labels to a motion vector (image coords)."""
    norm = math.hypot(dx, dy)
    if norm == 0:
        return "E"
    best, best_dot = None, -2.0
    for name, (ux, uy) in DIRECTIONS.items():
        dot = (dx * ux + dy * uy) / norm
        if dot > best_dot:
            best, best_dot = name, dot
    return best


def _arc_points(rng: np.ndarray, center, direction, config: SimulationConfig,
                leading: bool) -> tuple[np.ndarray, np.ndarray]:
    """Sample pixel coordinates along one edge arc of the pupil circle."""
    ux, uy = direction
    base_angle = math.atan2(uy, ux) + (0.0 if leading else math.pi)
    half = math.radians(config.arc_half_angle_deg)
    # Roughly one sample per boundary pixel along the arc.
    n = max(4, int(round(2 * half * config.pupil_radius_px)))
    angles = base_angle + np.linspace(-half, half, n)
    keep = rng.random(n) < config.emit_prob
    angles = angles[keep]
    radii = config.pupil_radius_px + rng.normal(0.0, config.radial_jitter_px, angles.size)
    xs = np.rint(center[0] + radii * np.cos(angles)).astype(int)
    ys = np.rint(center[1] + radii * np.sin(angles)).astype(int)
    ok = (xs >= 0) & (xs < config.width) & (ys >= 0) & (ys < config.height)
    reps = max(1, config.events_per_arc_point)
    return np.repeat(xs[ok], reps), np.repeat(ys[ok], reps)


def scripted_recording(scripts: list[SaccadeScript],
                       config: Optional[SimulationConfig] = None
                       ) -> tuple[EventStream, GroundTruth]:
    """Generate an event stream for a list of scripted saccades."""
    config = config or SimulationConfig()
    rng = np.random.default_rng(config.seed)
    truth = GroundTruth()

    ts, xs, ys, ps = [], [], [], []

    def emit(frame_idx, x_arr, y_arr, polarity):
        n = len(x_arr)
        if n == 0:
            return
        t0 = frame_idx * config.window_us
        ts.append(rng.integers(t0, t0 + config.window_us, size=n))
        xs.append(np.asarray(x_arr))
        ys.append(np.asarray(y_arr))
        ps.append(np.full(n, polarity, dtype=np.int8))

    moving = {}
    for script in scripts:
        n_steps = script.end_frame - script.start_frame
        for k, frame in enumerate(range(script.start_frame, script.end_frame + 1)):
            frac = (k + 0.5) / (n_steps + 1)
            cx = script.from_xy[0] + frac * (script.to_xy[0] - script.from_xy[0])
            cy = script.from_xy[1] + frac * (script.to_xy[1] - script.from_xy[1])
            dx = script.to_xy[0] - script.from_xy[0]
            dy = script.to_xy[1] - script.from_xy[1]
            moving[frame] = ((cx, cy), (dx, dy))

    for frame in range(config.n_frames):
        if frame in moving:
            (cx, cy), (dx, dy) = moving[frame]
            norm = math.hypot(dx, dy) or 1.0
            direction = (dx / norm, dy / norm)
            lx, ly = _arc_points(rng, (cx, cy), direction, config, leading=True)
            tx, ty = _arc_points(rng, (cx, cy), direction, config, leading=False)
            emit(frame, lx, ly, 1)
            emit(frame, tx, ty, -1)
            truth.centers[frame] = (cx, cy)
            truth.directions[frame] = nearest_compass(dx, dy)
        n_noise = rng.poisson(config.noise_events_per_frame)
        if n_noise:
            nx = rng.integers(0, config.width, size=n_noise)
            ny = rng.integers(0, config.height, size=n_noise)
            npol = rng.choice(np.array([-1, 1], dtype=np.int8), size=n_noise)
            for pol in (-1, 1):
                sel = npol == pol
                emit(frame, nx[sel], ny[sel], pol)

    if not ts:
        raise ValueError("simulation produced no events; check scripts/noise rate")
    stream = stream_from_arrays(
        np.concatenate(ts), np.concatenate(xs), np.concatenate(ys), np.concatenate(ps),
        sensor_width=config.width, sensor_height=config.height,
    )
    return stream, truth


def pupil_frame(center: tuple[float, float], direction_name: str,
                config: Optional[SimulationConfig] = None,
                frame_index: int = 0, seed: Optional[int] = None) -> PolarityFrame:
    """Single synthetic polarity frame of a pupil moving in a compass direction."""
    config = config or SimulationConfig()
    rng = np.random.default_rng(config.seed if seed is None else seed)
    direction = DIRECTIONS[direction_name]

    pos = np.zeros((config.height, config.width), dtype=np.int32)
    neg = np.zeros((config.height, config.width), dtype=np.int32)
    lx, ly = _arc_points(rng, center, direction, config, leading=True)
    tx, ty = _arc_points(rng, center, direction, config, leading=False)
    np.add.at(pos, (ly, lx), 1)
    np.add.at(neg, (ty, tx), 1)

    n_noise = rng.poisson(config.noise_events_per_frame)
    if n_noise:
        nx = rng.integers(0, config.width, size=n_noise)
        ny = rng.integers(0, config.height, size=n_noise)
        npol = rng.random(n_noise) < 0.5
        np.add.at(pos, (ny[npol], nx[npol]), 1)
        np.add.at(neg, (ny[~npol], nx[~npol]), 1)

    t0 = frame_index * config.window_us
    return PolarityFrame(
        index=frame_index, t_start_us=t0, t_end_us=t0 + config.window_us,
        pos_counts=pos, neg_counts=neg,
    )


def noise_frame(n_events: int, config: Optional[SimulationConfig] = None,
                seed: int = 0, frame_index: int = 0) -> PolarityFrame:
    """Uniform salt-and-pepper frame with no pupil signal."""
    config = config or SimulationConfig()
    rng = np.random.default_rng(seed)
    pos = np.zeros((config.height, config.width), dtype=np.int32)
    neg = np.zeros((config.height, config.width), dtype=np.int32)
    nx = rng.integers(0, config.width, size=n_events)
    ny = rng.integers(0, config.height, size=n_events)
    npol = rng.random(n_events) < 0.5
    np.add.at(pos, (ny[npol], nx[npol]), 1)
    np.add.at(neg, (ny[~npol], nx[~npol]), 1)
    t0 = frame_index * config.window_us
    return PolarityFrame(
        index=frame_index, t_start_us=t0, t_end_us=t0 + config.window_us,
        pos_counts=pos, neg_counts=neg,
    )


def ellipse_boundary_points(center, semi_axes, angle, n_points, seed=0,
                            noise_sigma=0.0) -> np.ndarray:
    """Points sampled on (or near) an ellipse boundary; RANSAC oracle input."""
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * math.pi, size=n_points)
    ca, sa = math.cos(angle), math.sin(angle)
    ex = semi_axes[0] * np.cos(theta)
    ey = semi_axes[1] * np.sin(theta)
    x = center[0] + ca * ex - sa * ey
    y = center[1] + sa * ex + ca * ey
    if noise_sigma > 0:
        x = x + rng.normal(0, noise_sigma, n_points)
        y = y + rng.normal(0, noise_sigma, n_points)
    return np.column_stack([x, y])
