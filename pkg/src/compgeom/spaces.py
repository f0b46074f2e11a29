"""Metric spaces, sampled paths and shortest paths.

Four kinds of space are provided:

* :class:`ModelSpace`   -- M_k with exact geodesics
* :class:`TaxicabPlane` -- R^2 with the l1 metric (non-unique geodesics)
* :class:`GraphSpace`   -- shortest-path metric of a :class:`MetricGraph`
* :class:`CubeSurface`  -- surface of a cube, discretized by a face-visibility graph
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import model_spaces as ms

SNAP_TOL = 1e-9


class DomainError(ValueError):
    """A point does not belong to the space."""


class DisconnectedError(ValueError):
    pass


class MetricSpace:
    """Distance plus shortest-path oracle.

    Subclasses set ``kind``; ``certified_error`` bounds how much a reported
    distance can exceed the true intrinsic distance, and ``curvature_bounds``
    is a (lower, upper) pair with ``None`` for "no bound".
    """

    kind = "abstract"
    certified_error = 0.0
    curvature_bounds: tuple[float | None, float | None] = (None, None)

    def validate(self, p):
        return p

    def distance(self, p, q) -> float:
        raise NotImplementedError

    def distance_matrix(self, P: Sequence, Q: Sequence) -> np.ndarray:
        out = np.empty((len(P), len(Q)))
        for i, p in enumerate(P):
            for j, q in enumerate(Q):
                out[i, j] = self.distance(p, q)
        return out

    def interpolate(self, p, q, frac: float):
        """Point a fraction of the way along a geodesic segment, or None if the
        space cannot interpolate (graph spaces)."""
        return None

    def shortest_path(self, p, q, resolution: float) -> SampledPath:
        raise NotImplementedError

    def shortest_paths(self, p, q, resolution: float) -> list[SampledPath]:
        """All shortest-path representatives the space can enumerate."""
        return [self.shortest_path(p, q, resolution)]

    def random_point(self, center, radius: float, rng: np.random.Generator):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class SampledPath:
    """A curve in ``space`` given by samples (t_i, point_i).

    ``func``, when present, evaluates the curve exactly at any parameter in
    ``[ts[0], ts[-1]]``; otherwise :meth:`at` interpolates between samples.
    """

    space: MetricSpace
    ts: np.ndarray
    points: tuple
    func: Callable[[float], Any] | None = field(default=None, repr=False)

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        points = tuple(self.points)
        if ts.ndim != 1 or len(ts) == 0 or len(ts) != len(points):
            raise ValueError("need matching, nonempty parameter and point lists")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("path parameters must be strictly increasing")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "points", points)

    @property
    def start(self):
        return self.points[0]

    @property
    def end(self):
        return self.points[-1]

    @property
    def duration(self) -> float:
        return float(self.ts[-1] - self.ts[0])

    def at(self, t: float):
        t0, t1 = self.ts[0], self.ts[-1]
        slop = 1e-12 * max(1.0, abs(t1))
        if t < t0 - slop or t > t1 + slop:
            raise ValueError(f"parameter {t!r} outside path domain [{t0!r}, {t1!r}]")
        t = min(max(t, t0), t1)
        if self.func is not None:
            return self.func(t)
        i = int(np.searchsorted(self.ts, t, side="right")) - 1
        i = min(max(i, 0), len(self.ts) - 1)
        if t == self.ts[i] or i == len(self.ts) - 1:
            return self.points[i]
        frac = (t - self.ts[i]) / (self.ts[i + 1] - self.ts[i])
        mid = self.space.interpolate(self.points[i], self.points[i + 1], frac)
        if mid is None:
            return self.points[i] if frac < 0.5 else self.points[i + 1]
        return mid

    def restrict(self, t: float, direction: int = 1) -> SampledPath:
        """The piece of the path leaving ``at(t)`` forward (+1) or backward (-1),
        reparameterized to start at 0."""
        if direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        t0, t1 = float(self.ts[0]), float(self.ts[-1])
        if not t0 < t < t1:
            raise ValueError(f"restriction point {t!r} must be interior to ({t0!r}, {t1!r})")
        if direction == 1:
            inner = self.ts[(self.ts > t)]
            us = np.concatenate([[0.0], inner - t])
        else:
            inner = self.ts[(self.ts < t)][::-1]
            us = np.concatenate([[0.0], t - inner])
        points = [self.at(t + direction * u) for u in us]
        func = None
        if self.func is not None:
            base = self.func
            func = lambda u: base(t + direction * u)  # noqa: E731
        return SampledPath(self.space, us, points, func)


def path_from_function(space: MetricSpace, func: Callable[[float], Any], T: float,
                       resolution: float | None = None, n: int = 64) -> SampledPath:
    if T <= 0:
        raise ValueError("path domain must have positive length")
    if resolution is not None:
        n = max(1, math.ceil(T / resolution))
    ts = np.linspace(0.0, T, n + 1)
    return SampledPath(space, ts, [func(t) for t in ts], func)


def polyline_path(space: MetricSpace, vertices: Sequence, resolution: float) -> SampledPath:
    """Unit-speed concatenation of geodesic segments between consecutive vertices.

    Each segment must be a geodesic that ``space.interpolate`` can follow.
    """
    verts = [space.validate(v) for v in vertices]
    verts = [v for i, v in enumerate(verts) if i == 0 or space.distance(verts[i - 1], v) > 0]
    if len(verts) < 2:
        raise ValueError("polyline needs two distinct vertices")
    lengths = [space.distance(a, b) for a, b in zip(verts, verts[1:])]
    knots = np.concatenate([[0.0], np.cumsum(lengths)])

    def func(t):
        i = int(np.searchsorted(knots, t, side="right")) - 1
        i = min(max(i, 0), len(lengths) - 1)
        frac = (t - knots[i]) / lengths[i]
        if frac <= 0:
            return verts[i]
        if frac >= 1:
            return verts[i + 1]
        return space.interpolate(verts[i], verts[i + 1], frac)

    ts = [0.0]
    for i, L in enumerate(lengths):
        m = max(1, math.ceil(L / resolution))
        ts.extend(knots[i] + L * np.arange(1, m + 1) / m)
    ts = np.array(ts)
    points = [func(t) for t in ts]
    points[-1] = verts[-1]
    return SampledPath(space, ts, points, func)


def distance(space: MetricSpace, p, q) -> float:
    return space.distance(p, q)


def shortest_path(space: MetricSpace, p, q, resolution: float) -> SampledPath:
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    return space.shortest_path(p, q, resolution)


def path_length(path: SampledPath) -> float:
    """Partition sum of distances between consecutive samples."""
    if len(path.points) < 2:
        raise ValueError("path_length needs at least two samples")
    sp = path.space
    return float(sum(sp.distance(a, b) for a, b in zip(path.points, path.points[1:])))


def arc_length_reparam(path: SampledPath) -> SampledPath:
    """Re-index samples by cumulative chord length (repeated samples are dropped)."""
    sp = path.space
    steps = [sp.distance(a, b) for a, b in zip(path.points, path.points[1:])]
    if not steps or sum(steps) <= 0:
        raise ValueError("cannot reparameterize a path of zero length")
    ts, pts = [0.0], [path.points[0]]
    for step, p in zip(steps, path.points[1:]):
        if step > 0:
            ts.append(ts[-1] + step)
            pts.append(p)
    return SampledPath(sp, np.array(ts), pts)


# ---------------------------------------------------------------------------
# analytic spaces


class ModelSpace(MetricSpace):
    kind = "model"

    def __init__(self, k: float):
        ms.diameter(k)
        self.k = float(k)
        self.curvature_bounds = (self.k, self.k)

    def __repr__(self):
        return f"ModelSpace(k={self.k!r})"

    def validate(self, p) -> ms.ModelPoint:
        try:
            return ms.as_point(p, self.k)
        except ms.ChartError as exc:
            raise DomainError(str(exc)) from exc

    def distance(self, p, q) -> float:
        return ms.model_distance(self.validate(p), self.validate(q), self.k)

    def distance_matrix(self, P, Q) -> np.ndarray:
        A = np.array([self.validate(p).coords for p in P])
        B = np.array([self.validate(q).coords for q in Q])
        return ms.model_distance_matrix(A, B, self.k)

    def interpolate(self, p, q, frac):
        d = self.distance(p, q)
        return ms.geodesic_point(p, q, frac * d, self.k)

    def shortest_path(self, p, q, resolution):
        p, q = self.validate(p), self.validate(q)
        d = self.distance(p, q)
        if d == 0:
            raise ValueError("shortest path between coincident points is degenerate")
        if self.k > 0 and d >= ms.diameter(self.k) * (1 - 1e-12):
            raise ms.GeodesicError("antipodal points have no unique shortest path")
        _, f = ms.geodesic(p, q, self.k)

        def func(t):
            if t <= 0:
                return p
            return q if t >= d else f(t)
        return path_from_function(self, func, d, resolution=resolution)

    def ray(self, base=None, phi: float = 0.0, length: float = 1.0,
            resolution: float = 0.01) -> SampledPath:
        """Unit-speed geodesic from ``base`` (default: chart origin) at azimuth ``phi``."""
        base = ms.origin(self.k) if base is None else self.validate(base)
        if self.k > 0 and length >= ms.diameter(self.k):
            raise ms.GeodesicError("a ray longer than D_k is not a shortest path")
        return path_from_function(self, lambda t: ms.point_at(base, t, phi, self.k), length,
                                  resolution=resolution)

    def random_point(self, center, radius, rng):
        center = ms.origin(self.k) if center is None else self.validate(center)
        r = radius * math.sqrt(rng.uniform())
        return ms.point_at(center, r, rng.uniform(0.0, 2 * math.pi), self.k)


class TaxicabPlane(MetricSpace):
    """R^2 with d(x, y) = |x1 - y1| + |x2 - y2|; points are float pairs."""

    kind = "taxicab"

    def __repr__(self):
        return "TaxicabPlane()"

    def validate(self, p) -> tuple[float, float]:
        try:
            x, y = (float(c) for c in p)
        except (TypeError, ValueError) as exc:
            raise DomainError(f"taxicab points are coordinate pairs, got {p!r}") from exc
        if not (math.isfinite(x) and math.isfinite(y)):
            raise DomainError("non-finite coordinates")
        return (x, y)

    def distance(self, p, q):
        (x1, y1), (x2, y2) = self.validate(p), self.validate(q)
        return abs(x1 - x2) + abs(y1 - y2)

    def distance_matrix(self, P, Q):
        A = np.asarray(P, dtype=float)[:, None, :]
        B = np.asarray(Q, dtype=float)[None, :, :]
        return np.abs(A - B).sum(axis=-1)

    def interpolate(self, p, q, frac):
        (x1, y1), (x2, y2) = self.validate(p), self.validate(q)
        return (x1 + frac * (x2 - x1), y1 + frac * (y2 - y1))

    def shortest_path(self, p, q, resolution):
        """Canonical representative: the axis-aligned L-path moving in x first."""
        p, q = self.validate(p), self.validate(q)
        return polyline_path(self, [p, (q[0], p[1]), q], resolution)

    def shortest_paths(self, p, q, resolution):
        p, q = self.validate(p), self.validate(q)
        paths = [self.shortest_path(p, q, resolution)]
        if p[0] != q[0] and p[1] != q[1]:
            paths.append(polyline_path(self, [p, (p[0], q[1]), q], resolution))
        return paths

    def random_point(self, center, radius, rng):
        cx, cy = (0.0, 0.0) if center is None else self.validate(center)
        while True:
            dx, dy = rng.uniform(-radius, radius, size=2)
            if abs(dx) + abs(dy) <= radius:
                return (cx + float(dx), cy + float(dy))


# ---------------------------------------------------------------------------
# graphs


@dataclass
class MetricGraph:
    """Vertices with 3-D coordinates and weighted undirected edges."""

    coords: dict[int, tuple[float, float, float]]
    edges: list[tuple[int, int, float]]
    adjacency: dict[int, list[tuple[int, float]]] = field(init=False, repr=False)

    def __post_init__(self):
        self.coords = {int(i): tuple(float(c) for c in xyz) for i, xyz in self.coords.items()}
        adj: dict[int, list[tuple[int, float]]] = {i: [] for i in self.coords}
        clean = []
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), float(w)
            if u not in adj or v not in adj:
                raise ValueError(f"edge ({u}, {v}) references an unknown vertex")
            if not w > 0:
                raise ValueError(f"edge ({u}, {v}) has nonpositive length {w!r}")
            adj[u].append((v, w))
            adj[v].append((u, w))
            clean.append((min(u, v), max(u, v), w))
        for nbrs in adj.values():
            nbrs.sort()
        self.edges = sorted(clean)
        self.adjacency = adj

    @property
    def n_vertices(self) -> int:
        return len(self.coords)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def is_connected(self) -> bool:
        if not self.coords:
            return True
        start = min(self.coords)
        seen, stack = {start}, [start]
        while stack:
            for v, _ in self.adjacency[stack.pop()]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == len(self.coords)

    def to_text(self) -> str:
        lines = [f"{self.n_vertices} {self.n_edges}"]
        for i in sorted(self.coords):
            x, y, z = self.coords[i]
            lines.append(f"{i} {x!r} {y!r} {z!r}")
        for u, v, w in self.edges:
            lines.append(f"{u} {v} {w!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> MetricGraph:
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 2:
            raise ValueError("metric graph header must be 'V E'")
        nv, ne = int(rows[0][0]), int(rows[0][1])
        if len(rows) != 1 + nv + ne:
            raise ValueError(f"expected {nv} vertex and {ne} edge lines, got {len(rows) - 1} lines")
        coords = {}
        for r in rows[1:1 + nv]:
            if len(r) != 4:
                raise ValueError(f"bad vertex line {' '.join(r)!r}")
            coords[int(r[0])] = (float(r[1]), float(r[2]), float(r[3]))
        edges = []
        for r in rows[1 + nv:]:
            if len(r) != 3:
                raise ValueError(f"bad edge line {' '.join(r)!r}")
            edges.append((int(r[0]), int(r[1]), float(r[2])))
        return cls(coords, edges)

    def write(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def read(cls, path) -> MetricGraph:
        return cls.from_text(Path(path).read_text())


def dijkstra(adjacency: dict[int, list[tuple[int, float]]], source: int):
    """Single-source shortest paths with every tied predecessor recorded.

    Returns (dist, preds) where preds[v] lists all predecessors achieving
    dist[v] within a relative tolerance of 1e-12, sorted by vertex id.
    """
    dist = {source: 0.0}
    preds: dict[int, list[int]] = {source: []}
    done = set()
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, w in adjacency[u]:
            if v in done:
                continue
            nd = d + w
            old = dist.get(v, math.inf)
            tol = 1e-12 * max(1.0, nd)
            if nd < old - tol:
                dist[v] = nd
                preds[v] = [u]
                heapq.heappush(heap, (nd, v))
            elif abs(nd - old) <= tol and u not in preds[v]:
                preds[v].append(u)
    for v in preds:
        preds[v].sort()
    return dist, preds


class GraphSpace(MetricSpace):
    """Shortest-path metric of a connected :class:`MetricGraph`.

    Points are vertex ids; coordinate triples snap to the nearest vertex and
    the snap distance of the last snap is kept in ``last_snap_distance``.
    """

    kind = "metric-graph"

    def __init__(self, graph: MetricGraph, max_paths: int = 16):
        if not graph.is_connected():
            raise DisconnectedError("metric graph must be connected")
        self.graph = graph
        self.max_paths = max_paths
        self._ids = np.array(sorted(graph.coords))
        self._xyz = np.array([graph.coords[i] for i in self._ids])
        self._cache: dict[int, tuple[dict, dict]] = {}
        self.last_snap_distance = 0.0

    def __repr__(self):
        return f"GraphSpace(V={self.graph.n_vertices}, E={self.graph.n_edges})"

    def snap(self, xyz) -> tuple[int, float]:
        xyz = np.asarray(xyz, dtype=float)
        if xyz.shape != (3,):
            raise DomainError(f"graph coordinates must be 3-vectors, got {xyz!r}")
        d = np.linalg.norm(self._xyz - xyz, axis=1)
        i = int(np.argmin(d))  # first minimum = lowest id
        return int(self._ids[i]), float(d[i])

    def validate(self, p) -> int:
        if isinstance(p, (int, np.integer)):
            if int(p) not in self.graph.coords:
                raise DomainError(f"unknown vertex {p!r}")
            return int(p)
        vid, dist = self.snap(p)
        self.last_snap_distance = dist
        return vid

    def _sssp(self, source: int):
        if source not in self._cache:
            if len(self._cache) > 512:
                self._cache.clear()
            self._cache[source] = dijkstra(self.graph.adjacency, source)
        return self._cache[source]

    def distance(self, p, q):
        p, q = self.validate(p), self.validate(q)
        if p == q:
            return 0.0
        a, b = min(p, q), max(p, q)
        dist, _ = self._sssp(a)
        if b not in dist:
            raise DisconnectedError(f"vertices {p} and {q} are not connected")
        return dist[b]

    def _chains(self, p: int, q: int, limit: int) -> list[list[int]]:
        """Vertex chains p -> q through tied predecessors, lexicographic order."""
        dist, preds = self._sssp(p)
        if q not in dist:
            raise DisconnectedError(f"vertices {p} and {q} are not connected")
        out: list[list[int]] = []

        def walk(v, tail):
            if len(out) >= limit:
                return
            if v == p:
                out.append([p] + tail)
                return
            for u in preds[v]:
                walk(u, [v] + tail)

        walk(q, [])
        return out

    def _chain_path(self, chain: list[int]) -> SampledPath:
        steps = [self.distance(a, b) for a, b in zip(chain, chain[1:])]
        ts = np.concatenate([[0.0], np.cumsum(steps)])
        return SampledPath(self, ts, chain)

    def shortest_path(self, p, q, resolution):
        p, q = self.validate(p), self.validate(q)
        if p == q:
            raise ValueError("shortest path between coincident points is degenerate")
        return self._chain_path(self._chains(p, q, 1)[0])

    def shortest_paths(self, p, q, resolution):
        p, q = self.validate(p), self.validate(q)
        return [self._chain_path(c) for c in self._chains(p, q, self.max_paths)]

    def random_point(self, center, radius, rng):
        ids = list(self._ids)
        if center is None:
            return int(ids[rng.integers(len(ids))])
        center = self.validate(center)
        dist, _ = self._sssp(center)
        near = sorted(v for v, d in dist.items() if d <= radius)
        return int(near[rng.integers(len(near))])


# ---------------------------------------------------------------------------
# cube surface


class CubeSurface(MetricSpace):
    """Surface of the cube [0, edge]^3 discretized at a refinement level.

    The mesh has 2**level segments per cube edge (4**level cells per face).
    Two mesh vertices are joined whenever they share a face, with weight the
    Euclidean chord, which is exact inside a flat face. Graph geodesics
    therefore only err by where they cross cube edges: each crossing is off
    by at most h/2 along the edge (h the mesh spacing), costing at most h, and
    a shortest path crosses at most five edges.

    Points are arbitrary surface points given as 3-vectors; they are joined
    exactly to the mesh vertices of their faces, so no snapping is needed.
    Only vertices on cube edges take part in the search.
    """

    kind = "cube-surface"
    curvature_bounds = (0.0, None)

    def __init__(self, edge: float = 1.0, level: int = 0):
        if edge <= 0:
            raise ValueError("cube edge must be positive")
        if level < 0:
            raise ValueError("refinement level must be nonnegative")
        self.edge = float(edge)
        self.level = int(level)
        n = 2 ** self.level
        self.n = n
        self.h = self.edge / n
        self.certified_error = 5.0 * self.h

        lattice = set()
        for axis in range(3):
            others = [a for a in range(3) if a != axis]
            for s0 in (0, n):
                for s1 in (0, n):
                    for i in range(n + 1):
                        v = [0, 0, 0]
                        v[axis], v[others[0]], v[others[1]] = i, s0, s1
                        lattice.add(tuple(v))
        self._lattice = sorted(lattice)
        self._xyz = np.array(self._lattice, dtype=float) * self.h
        self.faces = [(axis, side) for axis in range(3) for side in (0, n)]
        self._face_nodes = []
        B = len(self._lattice)
        W = np.full((B, B), np.inf)
        lat = np.array(self._lattice)
        for axis, side in self.faces:
            idx = np.flatnonzero(lat[:, axis] == side)
            self._face_nodes.append(idx)
            P = self._xyz[idx]
            W[np.ix_(idx, idx)] = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=-1)
        np.fill_diagonal(W, np.inf)
        self._W = W
        self._cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}

    def __repr__(self):
        return f"CubeSurface(edge={self.edge!r}, level={self.level})"

    @property
    def n_vertices(self) -> int:
        """Vertex count of the triangulated mesh."""
        n = self.n
        return 6 * (n - 1) ** 2 + 12 * (n - 1) + 8

    @property
    def n_edge_vertices(self) -> int:
        return len(self._lattice)

    def validate(self, p) -> tuple[float, float, float]:
        try:
            v = np.array([float(c) for c in p])
        except (TypeError, ValueError) as exc:
            raise DomainError(f"cube points are 3-vectors, got {p!r}") from exc
        if v.shape != (3,):
            raise DomainError(f"cube points are 3-vectors, got {p!r}")
        tol = SNAP_TOL * self.edge
        if np.any(v < -tol) or np.any(v > self.edge + tol):
            raise DomainError(f"point {p!r} lies outside the cube")
        v = np.clip(v, 0.0, self.edge)
        on = False
        for a in range(3):
            if abs(v[a]) <= tol:
                v[a], on = 0.0, True
            elif abs(v[a] - self.edge) <= tol:
                v[a], on = self.edge, True
        if not on:
            raise DomainError(f"point {p!r} is inside the cube, not on its surface")
        return (float(v[0]), float(v[1]), float(v[2]))

    def face_ids(self, p) -> list[int]:
        p = self.validate(p)
        return [f for f, (axis, side) in enumerate(self.faces)
                if p[axis] == side * self.h]

    def face_point(self, face: int, u: float, v: float) -> tuple[float, float, float]:
        """Point of face ``face`` with in-face coordinates (u, v) in [0, edge]^2."""
        axis, side = self.faces[face]
        others = [a for a in range(3) if a != axis]
        out = [0.0, 0.0, 0.0]
        out[axis] = side * self.h
        out[others[0]], out[others[1]] = u, v
        return self.validate(out)

    def _sssp(self, p):
        key = tuple(p)
        if key in self._cache:
            return self._cache[key]
        B = len(self._lattice)
        dist = np.full(B, np.inf)
        pred = np.full(B, -1)
        for f in self.face_ids(p):
            idx = self._face_nodes[f]
            d = np.linalg.norm(self._xyz[idx] - np.array(p), axis=1)
            dist[idx] = np.minimum(dist[idx], d)
        done = np.zeros(B, dtype=bool)
        for _ in range(B):
            masked = np.where(done, np.inf, dist)
            u = int(np.argmin(masked))
            if not np.isfinite(masked[u]):
                break
            done[u] = True
            cand = dist[u] + self._W[u]
            # scalar tolerance: a per-entry one would be inf wherever there is no edge
            tol = 1e-12 * max(1.0, dist[u] + 3.0 * self.edge)
            with np.errstate(invalid="ignore"):
                better = (cand < dist - tol) & ~done
                tie = (np.abs(cand - dist) <= tol) & ~done & (pred > u)
            upd = better | tie
            dist[better] = cand[better]
            pred[upd] = u
        if len(self._cache) > 256:
            self._cache.clear()
        self._cache[key] = (dist, pred)
        return dist, pred

    def _exits(self, p, q):
        """(candidate lengths, node ids) for reaching q through each mesh node."""
        dist, _ = self._sssp(p)
        nodes = np.unique(np.concatenate([self._face_nodes[f] for f in self.face_ids(q)]))
        legs = np.linalg.norm(self._xyz[nodes] - np.array(q), axis=1)
        return dist[nodes] + legs, nodes

    def distance(self, p, q):
        p, q = self.validate(p), self.validate(q)
        if set(self.face_ids(p)) & set(self.face_ids(q)):
            return float(math.dist(p, q))
        total, _ = self._exits(p, q)
        return float(total.min())

    def interpolate(self, p, q, frac):
        a, b = np.array(p), np.array(q)
        return tuple(float(c) for c in a + frac * (b - a))

    def _polyline(self, p, q, last: int, resolution: float) -> SampledPath:
        _, pred = self._sssp(p)
        chain = []
        v = last
        while v >= 0:
            chain.append(tuple(float(c) for c in self._xyz[v]))
            v = int(pred[v])
        verts = [p] + chain[::-1] + [q]
        verts = [v for i, v in enumerate(verts) if i == 0 or v != verts[i - 1]]
        return polyline_path(self, verts, resolution)

    def shortest_paths(self, p, q, resolution):
        p, q = self.validate(p), self.validate(q)
        if p == q:
            raise ValueError("shortest path between coincident points is degenerate")
        if set(self.face_ids(p)) & set(self.face_ids(q)):
            return [polyline_path(self, [p, q], resolution)]
        total, nodes = self._exits(p, q)
        best = total.min()
        tied = nodes[total <= best + 1e-12 * max(1.0, best)]
        return [self._polyline(p, q, int(v), resolution) for v in tied]

    def shortest_path(self, p, q, resolution):
        return self.shortest_paths(p, q, resolution)[0]

    def random_point(self, center, radius, rng):
        for _ in range(10000):
            face = int(rng.integers(6))
            u, v = rng.uniform(0.0, self.edge, size=2)
            pt = self.face_point(face, float(u), float(v))
            if center is None or self.distance(center, pt) <= radius:
                return pt
        raise ValueError("could not sample a point within the requested radius")

    def to_metric_graph(self) -> MetricGraph:
        """The triangulated surface mesh (grid edges plus one diagonal per cell)."""
        n = self.n
        verts = set()
        cells = []
        for axis, side in self.faces:
            others = [a for a in range(3) if a != axis]
            for i in range(n + 1):
                for j in range(n + 1):
                    v = [0, 0, 0]
                    v[axis], v[others[0]], v[others[1]] = side, i, j
                    verts.add(tuple(v))
            cells.append((axis, side, others))
        order = sorted(verts)
        ids = {v: i for i, v in enumerate(order)}
        edges = set()
        for axis, side, others in cells:
            def vid(i, j):
                v = [0, 0, 0]
                v[axis], v[others[0]], v[others[1]] = side, i, j
                return ids[tuple(v)]
            for i in range(n + 1):
                for j in range(n + 1):
                    if i < n:
                        edges.add((vid(i, j), vid(i + 1, j)))
                    if j < n:
                        edges.add((vid(i, j), vid(i, j + 1)))
                    if i < n and j < n:
                        edges.add((vid(i, j), vid(i + 1, j + 1)))
        coords = {i: tuple(c * self.h for c in v) for v, i in ids.items()}
        weighted = [(min(u, v), max(u, v), math.dist(coords[u], coords[v])) for u, v in edges]
        return MetricGraph(coords, weighted)


def build_cube_surface(edge: float = 1.0, level: int = 0) -> CubeSurface:
    return CubeSurface(edge, level)


def sample_points(space: MetricSpace, n: int, center, radius: float,
                  rng: np.random.Generator) -> list:
    return [space.random_point(center, radius, rng) for _ in range(n)]


def iter_pairs(items: Iterable):
    items = list(items)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            yield items[i], items[j]
