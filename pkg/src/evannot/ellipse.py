"""Robust ellipse fitting of pupil boundary points.

The conic is parameterized as a*x^2 + b*x*y + c*y^2 + d*x + e*y = 1
(constant term fixed at -1), so a minimal sample of 5 points gives a plain
5x5 linear solve.  RANSAC draws seeded minimal samples, scores candidates
by Sampson-distance inliers and refits the winner by least squares on its
inlier set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateConic,
    DegenerateSample,
    InsufficientPoints,
    NoModelFound,
    NotAnEllipse,
)

MIN_SAMPLE = 5  # free coefficients of the fixed-constant conic


@dataclass(frozen=True)
class Conic:
    a: float
    b: float
    c: float
    d: float
    e: float

    def coefficients(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d, self.e])

    def evaluate(self, x, y):
        """a*x^2 + b*x*y + c*y^2 + d*x + e*y - 1."""
        return self.a * x * x + self.b * x * y + self.c * y * y + self.d * x + self.e * y - 1.0

    @property
    def discriminant(self) -> float:
        return 4.0 * self.a * self.c - self.b * self.b


@dataclass(frozen=True)
class EllipseFit:
    conic: Conic
    center: tuple[float, float]
    semi_axes: tuple[float, float]  # (major, minor)
    angle: float  # radians in [0, pi)
    inlier_count: int
    inlier_ratio: float
    inlier_indices: np.ndarray


@dataclass
class RansacConfig:
    iterations: int = 1000
    inlier_tol_px: float = 2.0
    min_inlier_ratio: float = 0.3
    rng_seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.inlier_tol_px <= 0:
            raise ValueError("inlier_tol_px must be positive")


def fit_conic_5pts(points) -> Conic:
    """Exact conic through 5 distinct points (5x5 linear solve)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape != (MIN_SAMPLE, 2):
        raise InsufficientPoints(f"need exactly 5 points, got {pts.shape}")
    if len({(float(x), float(y)) for x, y in pts}) < MIN_SAMPLE:
        raise DegenerateSample("repeated points in minimal sample")
    x, y = pts[:, 0], pts[:, 1]
    m = np.column_stack([x * x, x * y, y * y, x, y])
    try:
        coeffs = np.linalg.solve(m, np.ones(MIN_SAMPLE))
    except np.linalg.LinAlgError:
        raise DegenerateSample("singular 5-point system") from None
    if not np.all(np.isfinite(coeffs)):
        raise DegenerateSample("non-finite solution")
    # Guard against numerically singular systems that solve() lets through.
    if np.max(np.abs(m @ coeffs - 1.0)) > 1e-6 * max(1.0, np.max(np.abs(coeffs))):
        raise DegenerateSample("ill-conditioned 5-point system")
    return Conic(*coeffs)


def fit_conic_lstsq(points) -> Conic:
    """Least-squares conic over >= 5 points, same parameterization."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape[0] < MIN_SAMPLE:
        raise InsufficientPoints(f"need at least 5 points, got {pts.shape[0]}")
    x, y = pts[:, 0], pts[:, 1]
    m = np.column_stack([x * x, x * y, y * y, x, y])
    coeffs, _, rank, _ = np.linalg.lstsq(m, np.ones(len(pts)), rcond=None)
    if rank < MIN_SAMPLE or not np.all(np.isfinite(coeffs)):
        raise DegenerateSample("rank-deficient least-squares system")
    return Conic(*coeffs)


def conic_center(conic: Conic) -> tuple[float, float]:
    """Center of the conic: solve [2a b; b 2c] (x, y)^T = (-d, -e)^T."""
    if conic.discriminant <= 0:
        raise NotAnEllipse(f"discriminant 4ac - b^2 = {conic.discriminant:.3g} <= 0")
    m = np.array([[2.0 * conic.a, conic.b], [conic.b, 2.0 * conic.c]])
    cx, cy = np.linalg.solve(m, [-conic.d, -conic.e])
    return (float(cx), float(cy))


def conic_to_ellipse_params(conic: Conic):
    """Extract (center, (major, minor), angle) from an ellipse conic.

    Angle is the major-axis direction in [0, pi); circles return 0.
    """
    cx, cy = conic_center(conic)
    # Conic value at the center; the ellipse is Q(p - center) = -g0 with
    # Q = [[a, b/2], [b/2, c]].
    g0 = conic.evaluate(cx, cy)
    q = np.array([[conic.a, conic.b / 2.0], [conic.b / 2.0, conic.c]])
    eigvals, eigvecs = np.linalg.eigh(q)
    axes_sq = -g0 / eigvals
    if np.any(axes_sq <= 0) or not np.all(np.isfinite(axes_sq)):
        raise DegenerateConic("no real positive axes")
    axes = np.sqrt(axes_sq)
    # Order by axis length (eigenvalue order flips with the conic's overall
    # sign, so sort explicitly).
    order = np.argsort(axes)[::-1]
    major, minor = float(axes[order[0]]), float(axes[order[1]])
    if math.isclose(major, minor, rel_tol=1e-12):
        angle = 0.0
    else:
        vx, vy = eigvecs[:, order[0]]
        angle = math.atan2(vy, vx) % math.pi
    return (cx, cy), (major, minor), angle


def ellipse_params_to_conic(center, semi_axes, angle) -> Conic:
    """Inverse of :func:`conic_to_ellipse_params` (normalized to f = -1)."""
    cx, cy = center
    major, minor = semi_axes
    ca, sa = math.cos(angle), math.sin(angle)
    rot = np.array([[ca, -sa], [sa, ca]])
    q = rot @ np.diag([1.0 / major**2, 1.0 / minor**2]) @ rot.T
    a, b, c = q[0, 0], 2.0 * q[0, 1], q[1, 1]
    d = -2.0 * q[0, 0] * cx - 2.0 * q[0, 1] * cy
    e = -2.0 * q[1, 1] * cy - 2.0 * q[0, 1] * cx
    f = q[0, 0] * cx * cx + 2.0 * q[0, 1] * cx * cy + q[1, 1] * cy * cy - 1.0
    if abs(f) < 1e-15:
        raise DegenerateConic("ellipse passes through the origin; f = -1 form unavailable")
    scale = -1.0 / f
    return Conic(a * scale, b * scale, c * scale, d * scale, e * scale)


def translate_conic(conic: Conic, tx: float, ty: float) -> Conic:
    """Conic of the curve shifted by (tx, ty), renormalized to f = -1.

    If ``conic`` describes g(u) = 0, the result describes the same curve in
    x = u + t coordinates.
    """
    a, b, c, d, e = conic.a, conic.b, conic.c, conic.d, conic.e
    d2 = d - 2.0 * a * tx - b * ty
    e2 = e - b * tx - 2.0 * c * ty
    f2 = a * tx * tx + b * tx * ty + c * ty * ty - d * tx - e * ty - 1.0
    if abs(f2) < 1e-15:
        raise DegenerateConic("translated curve passes through the origin")
    s = -1.0 / f2
    return Conic(a * s, b * s, c * s, d2 * s, e2 * s)


def sampson_distance(conic: Conic, points: np.ndarray) -> np.ndarray:
    """First-order geometric distance of points to the conic curve."""
    x, y = points[:, 0], points[:, 1]
    g = conic.evaluate(x, y)
    gx = 2.0 * conic.a * x + conic.b * y + conic.d
    gy = conic.b * x + 2.0 * conic.c * y + conic.e
    grad = np.hypot(gx, gy)
    return np.abs(g) / np.maximum(grad, 1e-12)


def _inliers(conic: Conic, points: np.ndarray, tol: float) -> np.ndarray:
    return np.nonzero(sampson_distance(conic, points) <= tol)[0]


def ransac_fit(points, config: RansacConfig | None = None) -> EllipseFit:
    """Seeded RANSAC ellipse fit over candidate boundary points.

    Best model by inlier count (ties: smaller mean inlier distance), then a
    least-squares refit on the winning inlier set.  Deterministic for a
    fixed ``rng_seed``.
    """
    config = config or RansacConfig()
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < MIN_SAMPLE:
        raise InsufficientPoints(f"need at least 5 points, got {0 if pts.ndim != 2 else pts.shape[0]}")
    n = pts.shape[0]

    rng = np.random.default_rng(config.rng_seed)
    # Pre-generate all sample index sets so iteration order never affects
    # the draw sequence.
    samples = np.array(
        [rng.choice(n, size=MIN_SAMPLE, replace=False) for _ in range(config.iterations)])
    k = samples.shape[0]

    # Shared design-matrix columns [x^2, xy, y^2, x, y] for minimal solves
    # and Sampson distances; GX/GY give the gradient, also linear in the
    # coefficients.
    x, y = pts[:, 0], pts[:, 1]
    zeros = np.zeros(n)
    ones = np.ones(n)
    cols = np.column_stack([x * x, x * y, y * y, x, y])
    gx_cols = np.column_stack([2.0 * x, y, zeros, ones, zeros])
    gy_cols = np.column_stack([zeros, x, 2.0 * y, zeros, ones])

    # Solve all minimal systems in one batch, then score every hypothesis
    # at once.  Exactly singular samples are masked out beforehand; the
    # residual guard below catches the merely ill-conditioned ones.
    mats = cols[samples]
    dets = np.linalg.det(mats)
    valid = np.isfinite(dets) & (dets != 0.0)
    coeffs_all = np.full((k, MIN_SAMPLE), np.nan)
    if valid.any():
        rhs = np.ones((int(valid.sum()), MIN_SAMPLE, 1))
        coeffs_all[valid] = np.linalg.solve(mats[valid], rhs)[:, :, 0]
    valid &= np.all(np.isfinite(coeffs_all), axis=1)
    with np.errstate(invalid="ignore"):
        resid = np.max(np.abs(np.einsum("kij,kj->ki", mats, coeffs_all) - 1.0), axis=1)
        scale = np.maximum(1.0, np.max(np.abs(coeffs_all), axis=1))
        valid &= resid <= 1e-6 * scale
        disc = 4.0 * coeffs_all[:, 0] * coeffs_all[:, 2] - coeffs_all[:, 1] ** 2
        valid &= disc > 0

    counts = np.full(k, -1)
    means = np.full(k, np.inf)
    idx_valid = np.flatnonzero(valid)
    # Chunked so the (n_points, n_candidates) distance matrix stays small.
    for lo in range(0, idx_valid.size, 256):
        sel = idx_valid[lo:lo + 256]
        ct = coeffs_all[sel].T
        g = cols @ ct - 1.0
        grad = np.hypot(gx_cols @ ct, gy_cols @ ct)
        dists = np.abs(g) / np.maximum(grad, 1e-12)
        mask = dists <= config.inlier_tol_px
        cnt = mask.sum(axis=0)
        ok = cnt >= MIN_SAMPLE
        counts[sel[ok]] = cnt[ok]
        means[sel[ok]] = (np.where(mask, dists, 0.0).sum(axis=0)[ok] / cnt[ok])

    best_count = counts.max(initial=-1)
    if best_count < MIN_SAMPLE:
        raise NoModelFound("no valid ellipse hypothesis")
    ties = np.flatnonzero(counts == best_count)
    best_idx = ties[np.argmin(means[ties])]

    coeffs = coeffs_all[best_idx]
    a, b, c, d, e = coeffs
    g = cols @ coeffs - 1.0
    gx = 2.0 * a * x + b * y + d
    gy = b * x + 2.0 * c * y + e
    dists = np.abs(g) / np.maximum(np.hypot(gx, gy), 1e-12)
    inl = np.nonzero(dists <= config.inlier_tol_px)[0]
    conic = Conic(*coeffs)
    # Least-squares refit on the winning inliers.  The fit runs in
    # centroid-centered coordinates: the fixed-f algebraic residual is not
    # translation invariant, centering makes the refit covariant (and
    # better conditioned).  Fall back to the minimal-sample model if the
    # refit degenerates or stops being an ellipse.
    try:
        mx, my = pts[inl].mean(axis=0)
        refit = fit_conic_lstsq(pts[inl] - [mx, my])
        if refit.discriminant > 0:
            conic = translate_conic(refit, mx, my)
    except (DegenerateSample, DegenerateConic):
        pass
    inl = _inliers(conic, pts, config.inlier_tol_px)
    ratio = inl.size / n
    if ratio < config.min_inlier_ratio:
        raise NoModelFound(f"inlier ratio {ratio:.2f} below {config.min_inlier_ratio}")

    center, axes, angle = conic_to_ellipse_params(conic)
    return EllipseFit(
        conic=conic,
        center=center,
        semi_axes=axes,
        angle=angle,
        inlier_count=int(inl.size),
        inlier_ratio=float(ratio),
        inlier_indices=inl,
    )
