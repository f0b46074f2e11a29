"""Upper and lower angles between paths with a common origin, plus checkers
for the properties such angles satisfy under a curvature bound.

Angles are computed from distances only: every estimate evaluates the
comparison angle of the triangle (origin, gamma(t), eta(s)) over square grids
of parameters shrinking geometrically toward 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .comparison import ANGLE_TOL, angle_from_sides
from .spaces import SNAP_TOL, MetricSpace, SampledPath


@dataclass(frozen=True)
class GridSchedule:
    """Levels eps_j = eps0 * factor**j, each sampled at ``samples_per_level``
    parameters spaced geometrically over [eps_j * span, eps_j].

    Geometric spacing lets every level see parameter ratios down to ``span``,
    which is what separates upper from lower angles in spaces where the
    comparison angle depends on t/s rather than on the scale.
    """

    eps0: float
    factor: float = 0.5
    levels: int = 12
    samples_per_level: int = 32
    span: float = 1e-3

    def __post_init__(self):
        if not self.eps0 > 0:
            raise ValueError("eps0 must be positive")
        if not 0 < self.factor < 1:
            raise ValueError("factor must lie in (0, 1)")
        if self.levels < 2:
            raise ValueError("need at least two levels")
        if self.samples_per_level < 2:
            raise ValueError("need at least two samples per level")
        if not 0 < self.span <= 1:
            raise ValueError("span must lie in (0, 1]")

    @classmethod
    def for_paths(cls, *paths: SampledPath, **kwargs) -> GridSchedule:
        """Default schedule with eps0 a quarter of the shortest path domain."""
        return cls(min(p.duration for p in paths) / 4.0, **kwargs)

    def level_eps(self) -> np.ndarray:
        return self.eps0 * self.factor ** np.arange(self.levels)

    def samples(self, level: int) -> np.ndarray:
        eps = self.eps0 * self.factor ** level
        n = self.samples_per_level
        return eps * self.span ** (np.arange(n - 1, -1, -1) / (n - 1))

    def all_samples(self) -> np.ndarray:
        return np.unique(np.concatenate([self.samples(j) for j in range(self.levels)]))

    def sweep(self) -> np.ndarray:
        """Grid samples between the finest level scale and eps0.

        Samples below the finest scale serve the sup/inf estimate only; there
        the side-length rounding error divided by t exceeds the 1e-9 slack.
        """
        ts = self.all_samples()
        return ts[ts >= self.level_eps()[-1] * (1 - 1e-12)]


@dataclass
class AngleEstimate:
    upper: float
    lower: float
    # (eps, sup, inf) with sup over all levels at or below eps (monotone envelopes)
    per_level: list[tuple[float, float, float]]
    k_used: float
    grid: GridSchedule
    raw_levels: list[tuple[float, float, float]] = field(repr=False)
    grids: list[np.ndarray] = field(repr=False)

    @property
    def error(self) -> float:
        """Self-reported bracket width: final-level sup minus inf plus angle tolerance."""
        return self.per_level[-1][1] - self.per_level[-1][2] + ANGLE_TOL


def _check_origins(space: MetricSpace, *paths: SampledPath):
    o = paths[0].start
    for p in paths[1:]:
        gap = space.distance(o, p.start)
        if gap > SNAP_TOL + space.certified_error:
            raise ValueError(f"paths do not share an origin (gap {gap!r})")
    return o


def _check_domain(grid: GridSchedule, *paths: SampledPath):
    for p in paths:
        if grid.eps0 > p.duration * (1 + 1e-12):
            raise ValueError(f"eps0={grid.eps0!r} exceeds path domain of length {p.duration!r}")


def _eval(path: SampledPath, ts: np.ndarray) -> list:
    t0 = path.ts[0]
    return [path.at(t0 + t) for t in ts]


def angle_grid(space: MetricSpace, origin, gamma: SampledPath, eta: SampledPath,
               ts: np.ndarray, ss: np.ndarray, k: float) -> np.ndarray:
    """Comparison angles theta[i, j] at ``origin`` for the pair (gamma(ts[i]), eta(ss[j]))."""
    G = _eval(gamma, ts)
    H = _eval(eta, ss)
    a = space.distance_matrix([origin], G)[0]
    b = space.distance_matrix([origin], H)[0]
    c = space.distance_matrix(G, H)
    with np.errstate(invalid="ignore", divide="ignore"):
        theta = angle_from_sides(a[:, None], b[None, :], c, k)
    return np.clip(theta, 0.0, math.pi)


def estimate_angles(space: MetricSpace, gamma: SampledPath, eta: SampledPath,
                    k: float = 0.0, grid: GridSchedule | None = None) -> AngleEstimate:
    """Upper angle = sup over the finest grid, lower angle = inf over it."""
    origin = _check_origins(space, gamma, eta)
    grid = grid or GridSchedule.for_paths(gamma, eta)
    _check_domain(grid, gamma, eta)
    raw, grids = [], []
    for j, eps in enumerate(grid.level_eps()):
        ts = grid.samples(j)
        th = angle_grid(space, origin, gamma, eta, ts, ts, k)
        grids.append(th)
        raw.append((float(eps), float(np.nanmax(th)), float(np.nanmin(th))))
    sups = np.maximum.accumulate([r[1] for r in raw][::-1])[::-1]
    infs = np.minimum.accumulate([r[2] for r in raw][::-1])[::-1]
    per_level = [(r[0], float(s), float(i)) for r, s, i in zip(raw, sups, infs)]
    return AngleEstimate(upper=per_level[-1][1], lower=per_level[-1][2], per_level=per_level,
                         k_used=k, grid=grid, raw_levels=raw, grids=grids)


def _curvature_direction(space: MetricSpace, k: float) -> str:
    lo, hi = space.curvature_bounds
    below = lo is not None and lo >= k
    above = hi is not None and hi <= k
    if below and above:
        return "constant"
    if above:
        return "nondecreasing"
    if below:
        return "nonincreasing"
    raise ValueError(f"{space!r} has no curvature bound relative to k={k}")


@dataclass
class MonotonicityReport:
    direction: str
    s0: float
    ts: np.ndarray
    angles: np.ndarray
    slack: float
    worst_violation: float
    n_violations: int

    @property
    def passed(self) -> bool:
        return self.n_violations == 0


def monotonicity_check(space: MetricSpace, gamma: SampledPath, eta: SampledPath,
                       k: float = 0.0, grid: GridSchedule | None = None,
                       s0: float | None = None) -> MonotonicityReport:
    """Check that t -> comparison angle(gamma(t), eta(s0)) is monotone in the
    direction implied by the space's curvature bound relative to k."""
    origin = _check_origins(space, gamma, eta)
    grid = grid or GridSchedule.for_paths(gamma, eta)
    _check_domain(grid, gamma, eta)
    direction = _curvature_direction(space, k)
    s0 = grid.eps0 if s0 is None else s0
    ts = grid.sweep()
    theta = angle_grid(space, origin, gamma, eta, ts, np.array([s0]), k)[:, 0]
    steps = np.diff(theta)
    if direction == "nonincreasing":
        excess = steps
    elif direction == "nondecreasing":
        excess = -steps
    else:
        excess = np.abs(steps)
    slack = 1e-9 + space.certified_error
    worst = float(excess.max()) if len(excess) else 0.0
    return MonotonicityReport(direction, float(s0), ts, theta, slack, worst,
                              int(np.sum(excess > slack)))


@dataclass
class TriangleInequalityReport:
    direct: float
    via: tuple[float, float]
    margin: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.margin >= -self.tolerance


def angle_triangle_inequality_check(space, gamma, eta, sigma, k=0.0, grid=None):
    """upper(gamma, eta) <= upper(gamma, sigma) + upper(sigma, eta)."""
    _check_origins(space, gamma, eta, sigma)
    grid = grid or GridSchedule.for_paths(gamma, eta, sigma)
    ge = estimate_angles(space, gamma, eta, k, grid)
    gs = estimate_angles(space, gamma, sigma, k, grid)
    se = estimate_angles(space, sigma, eta, k, grid)
    margin = gs.upper + se.upper - ge.upper
    return TriangleInequalityReport(ge.upper, (gs.upper, se.upper), margin,
                                    ge.error + gs.error + se.error)


@dataclass
class SupplementaryReport:
    forward: AngleEstimate
    backward: AngleEstimate
    total: float
    deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tol


def supplementary_angles_check(space, gamma: SampledPath, t_mid: float, sigma: SampledPath,
                               k: float = 0.0, grid: GridSchedule | None = None,
                               tol: float = 1e-6) -> SupplementaryReport:
    """Angles between sigma and the two halves of gamma at gamma(t_mid) should sum to pi."""
    t0, t1 = float(gamma.ts[0]), float(gamma.ts[-1])
    if not t0 < t_mid < t1:
        raise ValueError(f"t_mid={t_mid!r} must be interior to ({t0!r}, {t1!r})")
    fwd = gamma.restrict(t_mid, 1)
    bwd = gamma.restrict(t_mid, -1)
    grid = grid or GridSchedule.for_paths(fwd, bwd, sigma)
    a = estimate_angles(space, fwd, sigma, k, grid)
    b = estimate_angles(space, bwd, sigma, k, grid)
    total = a.upper + b.upper
    return SupplementaryReport(a, b, total, abs(total - math.pi), tol)


@dataclass
class KIndependenceReport:
    k_list: tuple[float, ...]
    estimates: list[AngleEstimate]
    spread_upper: float
    spread_lower: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.spread_upper <= self.tol and self.spread_lower <= self.tol


def k_independence_check(space, gamma, eta, grid=None, k_list: Sequence[float] = (-1.0, 0.0, 1.0),
                         tol: float = 1e-4) -> KIndependenceReport:
    grid = grid or GridSchedule.for_paths(gamma, eta)
    ests = [estimate_angles(space, gamma, eta, k, grid) for k in k_list]
    ups = [e.upper for e in ests]
    lows = [e.lower for e in ests]
    return KIndependenceReport(tuple(k_list), ests, max(ups) - min(ups),
                               max(lows) - min(lows), tol)


@dataclass
class DiagonalLimitReport:
    sups: list[float]
    infs: list[float]
    gaps: list[float]
    final_gap: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.final_gap <= self.tol


def diagonal_limit_check(f: Callable | Sequence[np.ndarray], grid: GridSchedule | None = None,
                         a: float = 0.0, tol: float = 1e-2) -> DiagonalLimitReport:
    """Per-level sup - inf of f over grids shrinking toward (a, a) from the right.

    ``f`` is either a callable f(x, y) (evaluated on ``grid``) or a sequence of
    per-level value arrays, e.g. ``AngleEstimate.grids``.
    """
    if callable(f):
        grid = grid or GridSchedule(eps0=1.0)
        levels = []
        for j in range(grid.levels):
            x = a + grid.samples(j)
            X, Y = np.meshgrid(x, x, indexing="ij")
            levels.append(np.vectorize(f, otypes=[float])(X, Y))
    else:
        levels = [np.asarray(v, dtype=float) for v in f]
    sups = [float(np.nanmax(v)) for v in levels]
    infs = [float(np.nanmin(v)) for v in levels]
    gaps = [s - i for s, i in zip(sups, infs)]
    return DiagonalLimitReport(sups, infs, gaps, gaps[-1], tol)


@dataclass
class StrongAngleReport:
    s: float
    # comparison angle at fixed s extrapolated to t = 0, and its sup over the finest level
    limit_t: float
    tail_sup: float
    upper: float
    error: float

    @property
    def passed(self) -> bool:
        return self.limit_t <= self.upper + self.error


def strong_angle_check(space, gamma, eta, s: float, k: float = 0.0,
                       grid: GridSchedule | None = None) -> StrongAngleReport:
    """For fixed s, the comparison angle as t -> 0 stays below the upper angle.

    Finite t carries an O(t) bias, so the t -> 0 value is extrapolated from the
    three largest samples of the finest level; smaller t would trade that bias
    for cancellation error of order eps * s / t.
    """
    origin = _check_origins(space, gamma, eta)
    grid = grid or GridSchedule.for_paths(gamma, eta)
    est = estimate_angles(space, gamma, eta, k, grid)
    ts = grid.samples(grid.levels - 1)
    theta = angle_grid(space, origin, gamma, eta, ts, np.array([s]), k)[:, 0]
    limit = _extrapolate_to_zero(ts[-3:], theta[-3:])
    return StrongAngleReport(float(s), limit, float(np.nanmax(theta)), est.upper, est.error)


def _extrapolate_to_zero(xs, ys) -> float:
    total = 0.0
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        w = 1.0
        for j, xj in enumerate(xs):
            if j != i:
                w *= xj / (xj - xi)
        total += w * yi
    return float(total)
