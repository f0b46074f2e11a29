"""Comparison triangles in the model planes M_k.

Side naming follows the vertex of interest ``x``: ``a = |xy|`` and ``b = |xz|``
are adjacent to it, ``c = |yz|`` is opposite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .model_spaces import (
    ModelPoint,
    diameter,
    from_polar,
    geodesic_point,
    model_distance,
    origin,
)

ANGLE_TOL = 1e-9
SIDE_TOL = 1e-10
ROUNDOFF = 8 * np.finfo(float).eps


class InadmissibleTriangle(ValueError):
    pass


@dataclass(frozen=True)
class TriangleSides:
    a: float
    b: float
    c: float

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    @property
    def perimeter(self) -> float:
        return self.a + self.b + self.c


SidesLike = Union[TriangleSides, Sequence[float]]


def _as_sides(sides: SidesLike) -> TriangleSides:
    if isinstance(sides, TriangleSides):
        return sides
    a, b, c = sides
    return TriangleSides(float(a), float(b), float(c))


def check_admissible(sides: SidesLike, k: float) -> bool:
    """Raise InadmissibleTriangle unless the sides are realizable in M_k.

    Realizability needs the triangle inequality and perimeter < 2*D_k. Returns
    whether the stricter perimeter < D_k also holds.
    """
    s = _as_sides(sides)
    vals = (s.a, s.b, s.c)
    if not all(math.isfinite(v) for v in vals):
        raise InadmissibleTriangle(f"non-finite side lengths {vals!r}")
    if min(vals) < 0:
        raise InadmissibleTriangle(f"negative side length in {vals!r}")
    slop = 1e-12 * s.perimeter
    if s.a > s.b + s.c + slop or s.b > s.a + s.c + slop or s.c > s.a + s.b + slop:
        raise InadmissibleTriangle(f"sides {vals!r} violate the triangle inequality")
    D = diameter(k)
    if not s.perimeter < 2 * D:
        raise InadmissibleTriangle(
            f"perimeter {s.perimeter!r} is not below 2*D_k = {2 * D!r}")
    return s.perimeter < D


def sn(x, k: float):
    """Generalized sine: sin(sqrt(k) x)/sqrt(k), x, or sinh(sqrt(-k) x)/sqrt(-k)."""
    if k > 0:
        r = math.sqrt(k)
        return np.sin(r * x) / r
    if k < 0:
        r = math.sqrt(-k)
        return np.sinh(r * x) / r
    return x


def angle_from_sides(a, b, c, k: float):
    """Vectorized comparison angle opposite ``c``; no admissibility checks.

    Uses the half-angle form of the law of cosines,
    tan(theta/2)^2 = sn(p-a) sn(p-b) / (sn(p) sn(p-c)) with p the half perimeter,
    which stays accurate for slivers where arccos of the plain law loses digits.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    p = (a + b + c) / 2.0
    # triangle-inequality slack below a few ulps of p is rounding, not geometry
    floor = ROUNDOFF * p
    pa, pb, pc = (np.where(x <= floor, 0.0, x) for x in (p - a, p - b, p - c))
    num = np.maximum(sn(pa, k) * sn(pb, k), 0.0)
    den = np.maximum(sn(p, k) * sn(pc, k), 0.0)
    return 2.0 * np.arctan2(np.sqrt(num), np.sqrt(den))


def comparison_angle(sides: SidesLike, k: float) -> float:
    """Angle at the vertex between sides ``a`` and ``b`` of the comparison triangle in M_k."""
    s = _as_sides(sides)
    if s.a <= 0 or s.b <= 0:
        raise InadmissibleTriangle("sides adjacent to the vertex must be positive")
    check_admissible(s, k)
    theta = float(angle_from_sides(s.a, s.b, s.c, k))
    return min(max(theta, 0.0), math.pi)


@dataclass(frozen=True)
class ComparisonTriangle:
    k: float
    x: ModelPoint
    y: ModelPoint
    z: ModelPoint
    sides: TriangleSides
    # False when the perimeter lies in [D_k, 2 D_k)
    within_diameter: bool = True

    def vertex(self, name: str) -> ModelPoint:
        return {"x": self.x, "y": self.y, "z": self.z}[name]

    def side_length(self, side: str) -> float:
        key = "".join(sorted(side))
        return {"xy": self.sides.a, "xz": self.sides.b, "yz": self.sides.c}[key]


def embed_triangle(sides: SidesLike, k: float) -> ComparisonTriangle:
    """Realize the sides in M_k: x at the chart origin, y along azimuth 0."""
    s = _as_sides(sides)
    if s.a <= 0 or s.b <= 0:
        raise InadmissibleTriangle("degenerate triangle: zero side at the base vertex")
    strict = check_admissible(s, k)
    theta = comparison_angle(s, k)
    x = origin(k)
    y = from_polar(s.a, 0.0, k)
    z = from_polar(s.b, theta, k)
    tri = ComparisonTriangle(k, x, y, z, s, strict)
    for (u, v), want in (((x, y), s.a), ((x, z), s.b), ((y, z), s.c)):
        got = model_distance(u, v, k)
        if abs(got - want) > SIDE_TOL * max(1.0, want):
            raise InadmissibleTriangle(
                f"embedding lost accuracy: side {want!r} realized as {got!r}")
    return tri


def comparison_point(tri: ComparisonTriangle, side: str, s: float) -> ModelPoint:
    """Point at arc length ``s`` from ``side[0]`` along the side toward ``side[1]``."""
    if len(side) != 2 or set(side) - set("xyz") or side[0] == side[1]:
        raise ValueError(f"side id must name two distinct vertices of xyz, got {side!r}")
    length = tri.side_length(side)
    slop = SIDE_TOL * max(1.0, length)
    if s < -slop or s > length + slop:
        raise ValueError(f"arc length {s!r} outside side {side} of length {length!r}")
    start, end = tri.vertex(side[0]), tri.vertex(side[1])
    if s <= 0:
        return start
    if s >= length:
        return end
    realized = model_distance(start, end, tri.k)
    return geodesic_point(start, end, min(s, realized), tri.k)


def thin_triangle_residual(t: float, s: float, d: float, k: float) -> float:
    """|cos(theta) - (s - d)/t| for the comparison angle theta of sides (t, s, d)."""
    theta = comparison_angle((t, s, d), k)
    return abs(math.cos(theta) - (s - d) / t)
