"""Distance to a finite net, the first-variation verifier, and random
comparison tests of curvature bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import model_spaces as ms
from .angles import GridSchedule, estimate_angles
from .comparison import comparison_point, embed_triangle
from .spaces import MetricSpace, SampledPath

TIE_RTOL = 1e-12


@dataclass(frozen=True)
class CompactSet:
    """Finite net standing in for a compact set; ``spacing`` is its net radius."""

    points: tuple
    ids: tuple[int, ...] = ()
    spacing: float = 0.0

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise ValueError("compact set must be nonempty")
        ids = tuple(self.ids) if self.ids else tuple(range(len(pts)))
        if len(ids) != len(pts) or len(set(ids)) != len(ids):
            raise ValueError("ids must be unique and match the points")
        if self.spacing < 0:
            raise ValueError("net spacing must be nonnegative")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "ids", ids)

    @classmethod
    def of(cls, space: MetricSpace, points: Sequence, ids: Sequence[int] = (),
           spacing: float = 0.0) -> CompactSet:
        return cls(tuple(space.validate(p) for p in points), tuple(ids), spacing)

    def point(self, pid: int):
        return self.points[self.ids.index(pid)]


class SetDistance(NamedTuple):
    distance: float
    point: object
    ids: tuple[int, ...]


def _set_distances(space: MetricSpace, p, K: CompactSet) -> np.ndarray:
    return np.array([space.distance(p, q) for q in K.points])


def distance_to_set(space: MetricSpace, p, K: CompactSet) -> SetDistance:
    """Minimum distance to K; ``ids`` lists every tied minimizer, ``point`` is the lowest id."""
    d = _set_distances(space, p, K)
    m = float(d.min())
    tied = sorted(K.ids[i] for i in np.flatnonzero(d <= m + TIE_RTOL * max(1.0, m)))
    return SetDistance(m, K.point(tied[0]), tuple(tied))


@dataclass
class Foot:
    id: int
    point: object
    distance: float
    angle: float
    error: float


class MinAngle(NamedTuple):
    angle: float
    feet: list[Foot]


def min_angle_to_set(space: MetricSpace, gamma: SampledPath, K: CompactSet,
                     slack: float | None = None, k: float = 0.0,
                     grid: GridSchedule | None = None) -> MinAngle:
    """Smallest upper angle between gamma and shortest paths to near-minimizing K points.

    Every shortest-path representative the space exposes is included.
    """
    origin = gamma.start
    d = _set_distances(space, origin, K)
    ell0 = float(d.min())
    if ell0 == 0:
        raise ValueError("gamma(0) lies in K")
    if slack is None:
        slack = 2 * K.spacing + space.certified_error
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    feet = []
    order = sorted(range(len(K.ids)), key=lambda i: K.ids[i])
    for i in order:
        if d[i] > ell0 + slack + TIE_RTOL * max(1.0, ell0):
            continue
        q = K.points[i]
        for path in space.shortest_paths(origin, q, resolution=d[i] / 64):
            g = grid or GridSchedule.for_paths(gamma, path)
            est = estimate_angles(space, gamma, path, k, g)
            feet.append(Foot(K.ids[i], q, float(d[i]), est.upper, est.error))
    if not feet:
        raise ValueError("no candidate feet in K")
    return MinAngle(min(f.angle for f in feet), feet)


def default_t_schedule(T: float, n: int = 15) -> np.ndarray:
    return T / 8.0 * 2.0 ** -np.arange(n)


def extrapolate_at_zero(ts: Sequence[float], qs: Sequence[float]) -> float:
    """Value at t=0 of the polynomial through the given (t, q) points."""
    ts = [float(t) for t in ts]
    total = 0.0
    for i, (ti, qi) in enumerate(zip(ts, qs)):
        w = 1.0
        for j, tj in enumerate(ts):
            if j != i:
                w *= tj / (tj - ti)
        total += w * qi
    return total


@dataclass
class VariationReport:
    ts: np.ndarray
    ells: np.ndarray
    ell0: float
    quotients: np.ndarray
    extrapolants: np.ndarray
    limit_estimate: float
    angle_min: float
    feet: list[Foot]
    tolerance: float
    upper_bound_ok: bool
    lipschitz_ok: bool

    @property
    def target(self) -> float:
        return -math.cos(self.angle_min)

    @property
    def residual(self) -> float:
        return abs(self.limit_estimate - self.target)

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance and self.upper_bound_ok and self.lipschitz_ok


def first_variation_check(space: MetricSpace, gamma: SampledPath, K: CompactSet, k: float = 0.0,
                          t_schedule: Sequence[float] | None = None,
                          grid: GridSchedule | None = None, tol: float | None = None,
                          slack: float | None = None) -> VariationReport:
    """Compare the one-sided derivative of t -> d(gamma(t), K) at 0 with -cos(min angle)."""
    T = gamma.duration
    ts = default_t_schedule(T) if t_schedule is None else np.asarray(t_schedule, dtype=float)
    if len(ts) < 3:
        raise ValueError("need at least three schedule points")
    if np.any(ts <= 0) or np.any(np.diff(ts) >= 0):
        raise ValueError("t_schedule must be positive and strictly decreasing")
    if ts[0] > T * (1 + 1e-12):
        raise ValueError(f"t_schedule starts at {ts[0]!r}, beyond the path domain {T!r}")
    t0 = gamma.ts[0]
    ell0 = distance_to_set(space, gamma.start, K).distance
    if ell0 == 0:
        raise ValueError("gamma(0) lies in K")
    ells = np.array([distance_to_set(space, gamma.at(t0 + t), K).distance for t in ts])
    quot = (ells - ell0) / ts
    extr = np.full(len(ts), np.nan)
    for j in range(2, len(ts)):
        extr[j] = extrapolate_at_zero(ts[j - 2:j + 1], quot[j - 2:j + 1])
    limit = float(extr[-1])

    angle_min, feet = min_angle_to_set(space, gamma, K, slack, k, grid)
    if tol is None:
        tol = 1e-6 + 2 * K.spacing + space.certified_error
    target = -math.cos(angle_min)
    upper_ok = bool(quot[-1] <= target + tol + abs(quot[-1] - quot[-2]))
    all_t = np.concatenate([[0.0], ts])
    all_l = np.concatenate([[ell0], ells])
    lip = np.abs(all_l[:, None] - all_l[None, :]) - np.abs(all_t[:, None] - all_t[None, :])
    lip_ok = bool(lip.max() <= 2 * space.certified_error + 1e-12 * max(1.0, ell0))
    return VariationReport(ts, ells, ell0, quot, extr, limit, angle_min, feet, tol,
                           upper_ok, lip_ok)


@dataclass
class Triangle:
    """Geodesic triangle with optional explicit side paths keyed 'xy', 'xz', 'yz'
    (each running from its first letter to its second)."""

    x: object
    y: object
    z: object
    paths: dict[str, SampledPath] = field(default_factory=dict)

    def vertex(self, name: str):
        return {"x": self.x, "y": self.y, "z": self.z}[name]


@dataclass
class Witness:
    vertices: tuple
    sides: tuple[float, float, float]
    u_side: str
    v_side: str
    u: object
    v: object
    distance: float
    comparison_distance: float
    excess: float


@dataclass
class CurvatureBoundReport:
    k: float
    direction: str
    trials: int
    seed: int
    violations: int
    worst_excess: float
    max_deviation: float
    witnesses: list[Witness]

    @property
    def passed(self) -> bool:
        return self.violations == 0


SIDES = ("xy", "xz", "yz")


def curvature_bound_test(space: MetricSpace, region: tuple, k: float, direction: str,
                         trials: int = 1000, seed: int = 0,
                         triangles: Sequence[Triangle] | None = None,
                         tol: float | None = None, max_witnesses: int = 10
                         ) -> CurvatureBoundReport:
    """Random comparison-point test of d(u, v) <= d_k(u', v') ("above") or >= ("below")."""
    if direction not in ("above", "below"):
        raise ValueError("direction must be 'above' or 'below'")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    center, radius = region
    if radius >= ms.diameter(k) / 3:
        raise ValueError("region radius must be below D_k/3 so triangles stay admissible")
    tol = 1e-9 + space.certified_error if tol is None else tol
    rng = np.random.default_rng(seed)
    violations, worst, max_dev, witnesses = 0, -math.inf, 0.0, []
    for trial in range(trials):
        if triangles:
            tri = triangles[trial % len(triangles)]
        else:
            tri = _random_triangle(space, center, radius, rng)
        paths = {}
        lengths = []
        for side in SIDES:
            p, q = tri.vertex(side[0]), tri.vertex(side[1])
            if side in tri.paths:
                path = tri.paths[side]
            else:
                # paths are only evaluated at single points, so coarse sampling suffices
                path = space.shortest_path(p, q, resolution=max(space.distance(p, q), 1e-12))
            paths[side] = path
            lengths.append(space.distance(p, q))
        model = embed_triangle(lengths, k)
        i, j = rng.choice(3, size=2, replace=False)
        su, sv = SIDES[i], SIDES[j]
        fu, fv = rng.uniform(size=2)
        lu, lv = lengths[i] * fu, lengths[j] * fv
        u = paths[su].at(paths[su].ts[0] + lu)
        v = paths[sv].at(paths[sv].ts[0] + lv)
        d = space.distance(u, v)
        dk = ms.model_distance(comparison_point(model, su, lu), comparison_point(model, sv, lv), k)
        excess = d - dk if direction == "above" else dk - d
        worst = max(worst, excess)
        max_dev = max(max_dev, abs(d - dk))
        if excess > tol:
            violations += 1
            if len(witnesses) < max_witnesses:
                witnesses.append(Witness((tri.x, tri.y, tri.z), tuple(lengths), su, sv,
                                         u, v, d, dk, excess))
    return CurvatureBoundReport(k, direction, trials, seed, violations, float(worst), max_dev,
                                witnesses)


def _random_triangle(space, center, radius, rng) -> Triangle:
    while True:
        x, y, z = (space.random_point(center, radius, rng) for _ in range(3))
        if min(space.distance(x, y), space.distance(x, z), space.distance(y, z)) > 1e-9:
            return Triangle(x, y, z)
