"""Exact geometry of the constant-curvature model planes M_k.

Points live in unit-normalized charts:

* ``plane``       -- R^2, used for k == 0
* ``sphere``      -- the unit sphere in R^3, used for k > 0 (radius 1/sqrt(k))
* ``hyperboloid`` -- the upper sheet z^2 - x^2 - y^2 = 1, used for k < 0

The physical scale is carried entirely by ``k``: a chart distance ``r`` is a
physical length ``r / sqrt(|k|)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PLANE = "plane"
SPHERE = "sphere"
HYPERBOLOID = "hyperboloid"

CHART_TOL = 1e-9


class ChartError(ValueError):
    """A point does not belong to the chart required by the curvature."""


class DegenerateError(ValueError):
    pass


class GeodesicError(ValueError):
    """Out-of-range arc length or non-unique geodesic."""


def diameter(k: float) -> float:
    if not math.isfinite(k):
        raise ValueError(f"curvature must be finite, got {k!r}")
    return math.pi / math.sqrt(k) if k > 0 else math.inf


def chart_for(k: float) -> str:
    if k > 0:
        return SPHERE
    if k < 0:
        return HYPERBOLOID
    return PLANE


def minkowski(u, v):
    """Lorentzian form x1*x2 + y1*y2 - z1*z2 (broadcasts over leading axes)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]


@dataclass(frozen=True)
class ModelPoint:
    chart: str
    coords: tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if self.chart == PLANE:
            if len(coords) != 2:
                raise ChartError(f"plane points need 2 coordinates, got {len(coords)}")
        elif self.chart == SPHERE:
            if len(coords) != 3:
                raise ChartError("sphere points need 3 coordinates")
            n = math.sqrt(sum(c * c for c in coords))
            if abs(n - 1.0) > CHART_TOL:
                raise ChartError(f"sphere point has norm {n!r}, expected 1")
        elif self.chart == HYPERBOLOID:
            if len(coords) != 3:
                raise ChartError("hyperboloid points need 3 coordinates")
            x, y, z = coords
            q = z * z - x * x - y * y
            if z < 1.0 - CHART_TOL or abs(q - 1.0) > CHART_TOL * max(1.0, z * z):
                raise ChartError(f"point {coords!r} is not on the upper hyperboloid sheet")
        else:
            raise ChartError(f"unknown chart {self.chart!r}")
        if not all(math.isfinite(c) for c in coords):
            raise ChartError("non-finite coordinates")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)

    @classmethod
    def plane(cls, x, y) -> ModelPoint:
        return cls(PLANE, (x, y))

    @classmethod
    def sphere(cls, x, y, z) -> ModelPoint:
        return cls(SPHERE, (x, y, z))

    @classmethod
    def hyperboloid(cls, x, y, z=None) -> ModelPoint:
        """Hyperboloid point; ``z`` is solved from (x, y) when omitted."""
        if z is None:
            z = math.sqrt(1.0 + x * x + y * y)
        return cls(HYPERBOLOID, (x, y, z))

    @classmethod
    def from_array(cls, chart: str, arr) -> ModelPoint:
        """Build a point from raw coordinates, renormalizing onto the chart."""
        return cls(chart, tuple(_renormalize(chart, np.asarray(arr, dtype=float))))


def _renormalize(chart: str, v: np.ndarray) -> np.ndarray:
    if chart == SPHERE:
        return v / np.linalg.norm(v)
    if chart == HYPERBOLOID:
        q = -minkowski(v, v)
        v = v / math.sqrt(q)
        if v[2] < 0:
            v = -v
        return v
    return v


def as_point(p, k: float) -> ModelPoint:
    """Coerce ``p`` (a ModelPoint or a raw coordinate sequence) to the chart of k."""
    chart = chart_for(k)
    if isinstance(p, ModelPoint):
        if p.chart != chart:
            raise ChartError(f"point uses chart {p.chart!r} but k={k} needs {chart!r}")
        return p
    return ModelPoint(chart, tuple(p))


def origin(k: float) -> ModelPoint:
    chart = chart_for(k)
    if chart == PLANE:
        return ModelPoint.plane(0.0, 0.0)
    return ModelPoint(chart, (0.0, 0.0, 1.0))


def from_polar(r: float, phi: float, k: float) -> ModelPoint:
    """Point at distance ``r`` from the chart origin, leaving it at azimuth ``phi``."""
    if r < 0:
        raise GeodesicError("polar radius must be nonnegative")
    chart = chart_for(k)
    if chart == PLANE:
        return ModelPoint.plane(r * math.cos(phi), r * math.sin(phi))
    rho = r * math.sqrt(abs(k))
    if chart == SPHERE:
        if rho > math.pi * (1 + 1e-12):
            raise GeodesicError("polar radius exceeds the sphere diameter")
        s, c = math.sin(rho), math.cos(rho)
    else:
        s, c = math.sinh(rho), math.cosh(rho)
    return ModelPoint.from_array(chart, [s * math.cos(phi), s * math.sin(phi), c])


def isometry_from_origin(base: ModelPoint) -> np.ndarray:
    """Isometry (as a matrix, or translation vector for the plane) taking the
    chart origin to ``base`` without twisting the tangent frame."""
    if base.chart == PLANE:
        return base.array
    x, y, z = base.coords
    if base.chart == HYPERBOLOID:
        # Lorentz boost along (x, y)
        return np.array([
            [1 + x * x / (1 + z), x * y / (1 + z), x],
            [x * y / (1 + z), 1 + y * y / (1 + z), y],
            [x, y, z],
        ])
    # rotation of the north pole onto base about the axis e3 x base
    if z < -1 + 1e-15:
        return np.diag([1.0, -1.0, -1.0])
    return np.array([
        [1 - x * x / (1 + z), -x * y / (1 + z), x],
        [-x * y / (1 + z), 1 - y * y / (1 + z), y],
        [-x, -y, z],
    ])


def _apply(iso: np.ndarray, p: ModelPoint) -> ModelPoint:
    if p.chart == PLANE:
        return ModelPoint.plane(*(p.array + iso))
    return ModelPoint.from_array(p.chart, iso @ p.array)


def point_at(base: ModelPoint, r: float, phi: float, k: float) -> ModelPoint:
    """Point reached by the geodesic leaving ``base`` at azimuth ``phi`` after length ``r``.

    Azimuths at ``base`` are measured in the frame transported from the chart
    origin by :func:`isometry_from_origin`.
    """
    base = as_point(base, k)
    return _apply(isometry_from_origin(base), from_polar(r, phi, k))


def _cross_norm(x, y) -> float:
    return math.sqrt((x[1] * y[2] - x[2] * y[1]) ** 2 + (x[2] * y[0] - x[0] * y[2]) ** 2
                     + (x[0] * y[1] - x[1] * y[0]) ** 2)


def _unit_distance(x: np.ndarray, y: np.ndarray, chart: str) -> float:
    if chart == SPHERE:
        return math.atan2(_cross_norm(x, y), float(x[0] * y[0] + x[1] * y[1] + x[2] * y[2]))
    ip = -float(minkowski(x, y))
    if ip < 2.0:
        diff = x - y
        chord2 = float(minkowski(diff, diff))
        return 2.0 * math.asinh(math.sqrt(max(chord2, 0.0)) / 2.0)
    return math.acosh(ip)


def model_distance(p, q, k: float) -> float:
    """Geodesic distance in M_k between two points in the chart of k."""
    p = as_point(p, k)
    q = as_point(q, k)
    if p.chart == PLANE:
        return math.hypot(p.coords[0] - q.coords[0], p.coords[1] - q.coords[1])
    return _unit_distance(p.array, q.array, p.chart) / math.sqrt(abs(k))


def model_distance_matrix(P: np.ndarray, Q: np.ndarray, k: float) -> np.ndarray:
    """Pairwise distances between coordinate arrays P (n x d) and Q (m x d)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))[:, None, :]
    Q = np.atleast_2d(np.asarray(Q, dtype=float))[None, :, :]
    if k == 0:
        return np.hypot(P[..., 0] - Q[..., 0], P[..., 1] - Q[..., 1])
    if k > 0:
        cross = np.cross(P, Q)
        d = np.arctan2(np.linalg.norm(cross, axis=-1), np.sum(P * Q, axis=-1))
    else:
        ip = -minkowski(P, Q)
        diff = P - Q
        chord2 = np.maximum(minkowski(diff, diff), 0.0)
        near = 2.0 * np.arcsinh(np.sqrt(chord2) / 2.0)
        far = np.arccosh(np.maximum(ip, 1.0))
        d = np.where(ip < 2.0, near, far)
    return d / math.sqrt(abs(k))


def _tangent(a: np.ndarray, b: np.ndarray, chart: str) -> np.ndarray:
    """Unnormalized initial direction at a of the geodesic toward b."""
    if chart == PLANE:
        return b - a
    if chart == SPHERE:
        return b - np.dot(a, b) * a
    return b + minkowski(a, b) * a


def geodesic(p, q, k: float):
    """Return (d, f) where f(s) is the point at arc length s from p toward q.

    The direction is computed once, so evaluating f is cheap; f does not
    range-check s.
    """
    p = as_point(p, k)
    q = as_point(q, k)
    d = model_distance(p, q, k)
    if k > 0 and d >= diameter(k) * (1 - 1e-12):
        raise GeodesicError("antipodal points have no unique geodesic")
    if d == 0:
        return d, lambda s: p
    if p.chart == PLANE:
        (x0, y0), (x1, y1) = p.coords, q.coords

        def f(s):
            r = s / d
            return ModelPoint.plane(x0 + r * (x1 - x0), y0 + r * (y1 - y0))
        return d, f
    x = p.array
    u = _tangent(x, q.array, p.chart)
    scale = math.sqrt(abs(k))
    if p.chart == SPHERE:
        u = u / np.linalg.norm(u)
        trig = (math.cos, math.sin)
    else:
        u = u / math.sqrt(float(minkowski(u, u)))
        trig = (math.cosh, math.sinh)

    def f(s):
        rho = s * scale
        return ModelPoint.from_array(p.chart, trig[0](rho) * x + trig[1](rho) * u)
    return d, f


def geodesic_point(p, q, s: float, k: float) -> ModelPoint:
    """Point at arc length ``s`` along the shortest path from ``p`` to ``q``."""
    p = as_point(p, k)
    q = as_point(q, k)
    d, f = geodesic(p, q, k)
    slop = 1e-12 * max(1.0, d)
    if s < -slop or s > d + slop:
        raise GeodesicError(f"arc length {s!r} outside [0, {d!r}]")
    if s <= 0 or d == 0:
        return p
    if s >= d:
        return q
    return f(s)


def vertex_angle(a, b, c, k: float) -> float:
    """Angle in [0, pi] at ``a`` between the geodesics a->b and a->c."""
    a, b, c = (as_point(v, k) for v in (a, b, c))
    D = diameter(k)
    for u, v in ((a, b), (a, c), (b, c)):
        if model_distance(u, v, k) >= D:
            raise GeodesicError("vertex_angle needs pairwise distances below the diameter")
    if a == b or a == c or model_distance(a, b, k) == 0 or model_distance(a, c, k) == 0:
        raise DegenerateError("vertex coincides with another point")
    x = a.array
    u = _tangent(x, b.array, a.chart)
    v = _tangent(x, c.array, a.chart)
    if a.chart == HYPERBOLOID:
        # move the vertex to the chart origin where the tangent plane is z = 0
        iso = isometry_from_origin(a)
        inv = np.diag([1.0, 1.0, -1.0]) @ iso.T @ np.diag([1.0, 1.0, -1.0])
        u, v = (inv @ u)[:2], (inv @ v)[:2]
    if u.shape[0] == 2:
        cross = abs(u[0] * v[1] - u[1] * v[0])
    else:
        cross = float(np.linalg.norm(np.cross(u, v)))
    return math.atan2(cross, float(np.dot(u, v)))
