"""Scenario runner: ``compgeom run <config.json | bundled-name>``.

A scenario is a JSON document naming a space, some paths and point sets, and
an ordered list of checks. Each check writes one entry to ``report.json`` and
one row to ``summary.csv``; checks with a convergence table also write a CSV
under ``checks/<check-id>/``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import angles, counterexamples, model_spaces as ms, spaces, variation

CONFIG_VERSION = 1
OUT_ENV = "COMPGEOM_OUT"
DEFAULT_OUT = "compgeom-out"

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    """Malformed scenario or reference to something that does not exist."""


# ---------------------------------------------------------------------------
# scenario construction


def build_space(cfg: dict, base_dir: Path) -> spaces.MetricSpace:
    kind = cfg.get("kind")
    if kind == "model":
        return spaces.ModelSpace(float(cfg["k"]))
    if kind == "taxicab":
        return spaces.TaxicabPlane()
    if kind == "cube":
        return spaces.build_cube_surface(float(cfg.get("edge", 1.0)), int(cfg.get("level", 0)))
    if kind == "graph":
        if "file" in cfg:
            return spaces.GraphSpace(spaces.MetricGraph.read(base_dir / cfg["file"]))
        return spaces.GraphSpace(spaces.MetricGraph.from_text(cfg["text"]))
    raise ConfigError(f"unknown space kind {kind!r}")


def build_point(space: spaces.MetricSpace, cfg):
    if isinstance(cfg, dict):
        if "polar" not in cfg or not isinstance(space, spaces.ModelSpace):
            raise ConfigError(f"polar points need a model space and a 'polar' entry: {cfg!r}")
        r, phi = cfg["polar"]
        base = ms.origin(space.k) if "base" not in cfg else build_point(space, cfg["base"])
        return ms.point_at(base, float(r), float(phi), space.k)
    return space.validate(cfg)


def _need_model(space, path_type):
    if not isinstance(space, spaces.ModelSpace):
        raise ConfigError(f"path type {path_type!r} needs a model space")
    return space


def _need_taxicab(space, path_type):
    if not isinstance(space, spaces.TaxicabPlane):
        raise ConfigError(f"path type {path_type!r} needs the taxicab plane")
    return space


def build_path(space: spaces.MetricSpace, cfg: dict) -> spaces.SampledPath:
    ptype = cfg.get("type")
    length = float(cfg.get("length", 1.0))
    res = float(cfg.get("resolution", 1e-3))
    if ptype in ("ray", "meridian"):
        sp = _need_model(space, ptype)
        if ptype == "meridian" and sp.k <= 0:
            raise ConfigError("meridians need a sphere (k > 0)")
        base = build_point(sp, cfg["base"]) if "base" in cfg else None
        return sp.ray(base, float(cfg.get("phi", 0.0)), length, res)
    if ptype == "equator":
        sp = _need_model(space, ptype)
        if sp.k <= 0:
            raise ConfigError("the equator needs a sphere (k > 0)")
        lon = float(cfg.get("lon", 0.0))
        sign = float(cfg.get("direction", 1.0))
        rate = math.sqrt(sp.k)

        def func(t):
            a = lon + sign * t * rate
            return ms.ModelPoint.sphere(math.cos(a), math.sin(a), 0.0)
        return spaces.path_from_function(sp, func, length, resolution=res)
    if ptype == "geodesic":
        return space.shortest_path(build_point(space, cfg["from"]),
                                   build_point(space, cfg["to"]), res)
    if ptype == "taxicab_diag":
        _need_taxicab(space, ptype)
        ox, oy = cfg.get("origin", (0.0, 0.0))
        sx, sy = cfg.get("signs", (1.0, 1.0))
        rate = 0.5 if cfg.get("unit_speed", False) else 1.0
        return spaces.path_from_function(
            space, lambda t: (ox + sx * rate * t, oy + sy * rate * t), length, resolution=res)
    if ptype == "taxicab_axis":
        _need_taxicab(space, ptype)
        ox, oy = cfg.get("origin", (0.0, 0.0))
        sign = float(cfg.get("sign", 1.0))
        axis = cfg.get("axis", "x")
        if axis not in ("x", "y"):
            raise ConfigError(f"axis must be 'x' or 'y', got {axis!r}")
        if axis == "x":
            return spaces.path_from_function(space, lambda t: (ox + sign * t, oy), length,
                                             resolution=res)
        return spaces.path_from_function(space, lambda t: (ox, oy + sign * t), length,
                                         resolution=res)
    if ptype == "polyline":
        return spaces.polyline_path(space, [build_point(space, v) for v in cfg["vertices"]], res)
    if ptype == "samples":
        return spaces.SampledPath(space, cfg["ts"], [build_point(space, p) for p in cfg["points"]])
    raise ConfigError(f"unknown path type {ptype!r}")


def build_set(space, cfg: dict) -> variation.CompactSet:
    pts = [build_point(space, p) for p in cfg["points"]]
    return variation.CompactSet(tuple(pts), tuple(cfg.get("ids", ())),
                                float(cfg.get("spacing", 0.0)))


def build_grid(cfg) -> angles.GridSchedule | None:
    if cfg is None:
        return None
    allowed = {"eps0", "factor", "levels", "samples_per_level", "span"}
    if not isinstance(cfg, dict) or set(cfg) - allowed:
        raise ConfigError(f"grid accepts only {sorted(allowed)}, got {cfg!r}")
    return angles.GridSchedule(**cfg)


# ---------------------------------------------------------------------------
# checks


@dataclass
class Outcome:
    payload: dict
    passed: bool | None = None
    error_bound: float | None = None
    tables: dict[str, tuple[list[str], list[list]]] = field(default_factory=dict)


@dataclass
class Context:
    space: spaces.MetricSpace
    paths: dict[str, spaces.SampledPath]
    sets: dict[str, variation.CompactSet]
    seed: int
    results: dict[str, Any] = field(default_factory=dict)

    def path(self, name):
        if name not in self.paths:
            raise ConfigError(f"unknown path {name!r}")
        return self.paths[name]

    def set(self, name):
        if name not in self.sets:
            raise ConfigError(f"unknown set {name!r}")
        return self.sets[name]


def _angle_table(est: angles.AngleEstimate):
    return (["eps", "sup", "inf"], [list(row) for row in est.per_level])


def op_distance(ctx, p, q):
    d = ctx.space.distance(build_point(ctx.space, p), build_point(ctx.space, q))
    return Outcome({"distance": d}, error_bound=ctx.space.certified_error)


def op_path_length(ctx, path):
    return Outcome({"length": spaces.path_length(ctx.path(path))})


def op_estimate_angles(ctx, gamma, eta, k=0.0, grid=None):
    est = angles.estimate_angles(ctx.space, ctx.path(gamma), ctx.path(eta), k, build_grid(grid))
    return Outcome({"upper": est.upper, "lower": est.lower, "k": k}, None, est.error,
                   {"angle_levels": _angle_table(est)}), est


def op_monotonicity_check(ctx, gamma, eta, k=0.0, grid=None, s0=None):
    r = angles.monotonicity_check(ctx.space, ctx.path(gamma), ctx.path(eta), k,
                                  build_grid(grid), s0)
    payload = {"direction": r.direction, "s0": r.s0, "worst_violation": r.worst_violation,
               "violations": r.n_violations, "samples": len(r.ts)}
    table = (["t", "angle"], [[t, a] for t, a in zip(r.ts, r.angles)])
    return Outcome(payload, r.passed, r.slack, {"monotonicity": table})


def op_angle_triangle_inequality_check(ctx, gamma, eta, sigma, k=0.0, grid=None):
    r = angles.angle_triangle_inequality_check(ctx.space, ctx.path(gamma), ctx.path(eta),
                                               ctx.path(sigma), k, build_grid(grid))
    return Outcome({"direct": r.direct, "via": list(r.via), "margin": r.margin},
                   r.passed, r.tolerance)


def op_supplementary_angles_check(ctx, gamma, t_mid, sigma, k=0.0, grid=None, tol=1e-6):
    r = angles.supplementary_angles_check(ctx.space, ctx.path(gamma), float(t_mid),
                                          ctx.path(sigma), k, build_grid(grid), tol)
    payload = {"forward": r.forward.upper, "backward": r.backward.upper, "total": r.total,
               "deviation": r.deviation}
    return Outcome(payload, r.passed, tol)


def op_k_independence_check(ctx, gamma, eta, grid=None, k_list=(-1.0, 0.0, 1.0), tol=1e-4):
    r = angles.k_independence_check(ctx.space, ctx.path(gamma), ctx.path(eta),
                                    build_grid(grid), [float(k) for k in k_list], tol)
    payload = {"k_list": list(r.k_list), "upper": [e.upper for e in r.estimates],
               "lower": [e.lower for e in r.estimates], "spread_upper": r.spread_upper,
               "spread_lower": r.spread_lower}
    return Outcome(payload, r.passed, tol)


DIAGONAL_FUNCTIONS: dict[str, Callable[[float, float], float]] = {
    "sum": lambda x, y: x + y,
    "ratio": lambda x, y: min(x, y) / max(x, y),
}


def op_diagonal_limit_check(ctx, function=None, source=None, grid=None, tol=1e-2):
    if (function is None) == (source is None):
        raise ConfigError("diagonal_limit_check needs exactly one of 'function' or 'source'")
    if source is not None:
        est = ctx.results.get(source)
        if not isinstance(est, angles.AngleEstimate):
            raise ConfigError(f"source {source!r} is not an earlier estimate_angles check")
        r = angles.diagonal_limit_check(est.grids, tol=tol)
        eps = [row[0] for row in est.per_level]
    else:
        if function not in DIAGONAL_FUNCTIONS:
            raise ConfigError(f"unknown diagonal function {function!r}")
        g = build_grid(grid) or angles.GridSchedule(eps0=1.0)
        r = angles.diagonal_limit_check(DIAGONAL_FUNCTIONS[function], g, tol=tol)
        eps = list(g.level_eps())
    table = (["eps", "sup", "inf"], [[e, s, i] for e, s, i in zip(eps, r.sups, r.infs)])
    return Outcome({"final_gap": r.final_gap}, r.passed, tol, {"diagonal_levels": table})


def op_distance_to_set(ctx, p, K):
    r = variation.distance_to_set(ctx.space, build_point(ctx.space, p), ctx.set(K))
    return Outcome({"distance": r.distance, "ids": list(r.ids), "point": r.point})


def op_min_angle_to_set(ctx, gamma, K, k=0.0, slack=None, grid=None):
    r = variation.min_angle_to_set(ctx.space, ctx.path(gamma), ctx.set(K), slack, k,
                                   build_grid(grid))
    feet = [{"id": f.id, "distance": f.distance, "angle": f.angle} for f in r.feet]
    return Outcome({"angle": r.angle, "feet": feet}, None, max(f.error for f in r.feet))


def op_first_variation_check(ctx, gamma, K, k=0.0, t_schedule=None, grid=None, tol=None,
                             slack=None):
    r = variation.first_variation_check(ctx.space, ctx.path(gamma), ctx.set(K), k, t_schedule,
                                        build_grid(grid), tol, slack)
    payload = {"limit_estimate": r.limit_estimate, "angle_min": r.angle_min,
               "target": r.target, "residual": r.residual,
               "upper_bound_ok": r.upper_bound_ok, "lipschitz_ok": r.lipschitz_ok,
               "feet": [{"id": f.id, "distance": f.distance, "angle": f.angle} for f in r.feet]}
    table = (["t", "quotient", "extrapolant"],
             [[t, q, e] for t, q, e in zip(r.ts, r.quotients, r.extrapolants)])
    return Outcome(payload, r.passed, r.tolerance, {"quotients": table})


NAMED_TRIANGLES = {
    "rectangle": counterexamples.rectangle_triangle,
    "branching": counterexamples.branching_triangle,
}


def op_curvature_bound_test(ctx, k, direction, radius, center=None, trials=1000,
                            triangles=None, tol=None):
    tris = None
    if triangles is not None:
        unknown = [t for t in triangles if t not in NAMED_TRIANGLES]
        if unknown:
            raise ConfigError(f"unknown triangles {unknown!r}")
        tris = [NAMED_TRIANGLES[t]() for t in triangles]
    c = None if center is None else build_point(ctx.space, center)
    r = variation.curvature_bound_test(ctx.space, (c, float(radius)), float(k), direction,
                                       int(trials), ctx.seed, tris, tol)
    witnesses = [{"vertices": list(w.vertices), "sides": list(w.sides), "u_side": w.u_side,
                  "v_side": w.v_side, "distance": w.distance,
                  "comparison_distance": w.comparison_distance, "excess": w.excess}
                 for w in r.witnesses]
    payload = {"violations": r.violations, "trials": r.trials, "seed": r.seed,
               "worst_excess": r.worst_excess, "max_deviation": r.max_deviation,
               "witnesses": witnesses}
    return Outcome(payload, r.passed, tol)


def op_cube_refinement(ctx, pairs, levels, edge=1.0, exact=None):
    """Distances between fixed surface point pairs across refinement levels.

    Passes when every pair's distance is nonincreasing in level and each level
    lies within its certified error of the finest level (or of ``exact``).
    """
    levels = [int(v) for v in levels]
    if sorted(set(levels)) != levels:
        raise ConfigError("levels must be strictly increasing")
    cubes = [spaces.build_cube_surface(float(edge), L) for L in levels]
    table = [[cube.distance(p, q) for p, q in pairs] for cube in cubes]
    D = np.array(table)
    ref = D[-1] if exact is None else np.asarray(exact, dtype=float)
    bounds = np.array([c.certified_error for c in cubes])
    nonincreasing = bool(np.all(np.diff(D, axis=0) <= 1e-12))
    within = bool(np.all(D - ref[None, :] <= bounds[:, None] + 1e-12)
                  and np.all(D - ref[None, :] >= -1e-12))
    rows = [[L] + row + [b] for L, row, b in zip(levels, table, bounds)]
    header = ["level"] + [f"pair{i}" for i in range(len(pairs))] + ["bound"]
    payload = {"distances": table, "nonincreasing": nonincreasing, "within_bound": within}
    return Outcome(payload, nonincreasing and within, float(bounds[-1]),
                   {"refinement": (header, rows)})


OPERATIONS: dict[str, Callable] = {
    "distance": op_distance,
    "path_length": op_path_length,
    "estimate_angles": op_estimate_angles,
    "monotonicity_check": op_monotonicity_check,
    "angle_triangle_inequality_check": op_angle_triangle_inequality_check,
    "supplementary_angles_check": op_supplementary_angles_check,
    "k_independence_check": op_k_independence_check,
    "diagonal_limit_check": op_diagonal_limit_check,
    "distance_to_set": op_distance_to_set,
    "min_angle_to_set": op_min_angle_to_set,
    "first_variation_check": op_first_variation_check,
    "curvature_bound_test": op_curvature_bound_test,
    "cube_refinement": op_cube_refinement,
}


def _bounds_ok(payload: dict, bounds: dict) -> bool:
    for key, (lo, hi) in bounds.items():
        if key not in payload:
            raise ConfigError(f"bound on unknown payload field {key!r}")
        v = payload[key]
        values = v if isinstance(v, list) else [v]
        if not all(lo <= float(x) <= hi for x in values):
            return False
    return True


# ---------------------------------------------------------------------------
# running and reporting


@dataclass
class CheckRecord:
    id: str
    op: str
    status: str
    payload: dict
    error_bound: float | None
    tables: dict
    runtime: float


@dataclass
class Report:
    name: str
    seed: int
    checks: list[CheckRecord]

    @property
    def exit_code(self) -> int:
        return EXIT_FAIL if any(c.status == "fail" for c in self.checks) else EXIT_OK


def load_config(ref: str) -> tuple[dict, Path]:
    path = Path(ref)
    if path.is_file():
        text, base = path.read_text(), path.parent
    else:
        name = ref[:-5] if ref.endswith(".json") else ref
        if name not in bundled_scenarios():
            raise ConfigError(f"no config file or bundled scenario named {ref!r}")
        text = resources.files("compgeom.scenarios").joinpath(f"{name}.json").read_text()
        base = Path(".")
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse {ref}: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("scenario must be a JSON object")
    if config.get("version") != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {config.get('version')!r}")
    for key in ("name", "space"):
        if key not in config:
            raise ConfigError(f"scenario lacks required field {key!r}")
    return config, base


def bundled_scenarios() -> list[str]:
    root = resources.files("compgeom.scenarios")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def run_scenario(config: dict, base_dir: Path = Path("."), seed: int | None = None) -> Report:
    seed = int(config.get("seed", 0) if seed is None else seed)
    checks = config.get("checks", [])
    seen = set()
    for i, chk in enumerate(checks):
        if not isinstance(chk, dict) or chk.get("op") not in OPERATIONS:
            raise ConfigError(f"check {i} names an unknown operation {chk!r}")
        cid = chk.get("id", f"{i}_{chk['op']}")
        if cid in seen:
            raise ConfigError(f"duplicate check id {cid!r}")
        seen.add(cid)
    try:
        space = build_space(config["space"], base_dir)
        paths = {n: build_path(space, s) for n, s in config.get("paths", {}).items()}
        sets = {n: build_set(space, s) for n, s in config.get("sets", {}).items()}
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad scenario definition: {exc!r}") from exc
    ctx = Context(space, paths, sets, seed)
    records = []
    for i, chk in enumerate(checks):
        cid = chk.get("id", f"{i}_{chk['op']}")
        func = OPERATIONS[chk["op"]]
        start = time.perf_counter()
        try:
            out = func(ctx, **chk.get("args", {}))
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"check {cid!r}: bad arguments: {exc}") from exc
        runtime = time.perf_counter() - start
        if isinstance(out, tuple):
            out, ctx.results[cid] = out
        passed = out.passed
        if "bounds" in chk:
            ok = _bounds_ok(out.payload, chk["bounds"])
            passed = ok if passed is None else (passed and ok)
        expect = chk.get("expect", "pass")
        if expect not in ("pass", "fail"):
            raise ConfigError(f"check {cid!r}: expect must be 'pass' or 'fail'")
        if passed is None:
            status = "diagnostic"
        elif expect == "fail":
            status = "xfail" if not passed else "fail"
        else:
            status = "pass" if passed else "fail"
        records.append(CheckRecord(cid, chk["op"], status, out.payload, out.error_bound,
                                   out.tables, runtime))
    return Report(config["name"], seed, records)


def _plain(obj):
    """JSON-ready copy: numpy scalars to floats, points to coordinate lists."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, ms.ModelPoint):
        return list(obj.coords)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def report_json(report: Report) -> str:
    doc = {
        "scenario": report.name,
        "seed": report.seed,
        "exit_code": report.exit_code,
        "checks": [{"id": c.id, "op": c.op, "status": c.status, "error_bound": c.error_bound,
                    "payload": c.payload} for c in report.checks],
    }
    return json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n"


def _headline(c: CheckRecord):
    for key in ("upper", "limit_estimate", "within_bound", "total", "margin", "worst_violation",
                "spread_upper", "final_gap", "violations", "angle", "distance", "length"):
        if key in c.payload:
            v = c.payload[key]
            return key, v if not isinstance(v, list) else v[0]
    return "", ""


def emit_tables(report: Report, out_dir) -> list[Path]:
    """Write report.json, summary.csv and one CSV per convergence table."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    p = out / "report.json"
    p.write_text(report_json(report))
    written.append(p)
    rows = []
    for c in report.checks:
        key, val = _headline(c)
        bound = "" if c.error_bound is None else c.error_bound
        rows.append([c.id, c.op, c.status, key, val, bound])
    p = out / "summary.csv"
    p.write_text(_csv_text(["check", "op", "status", "quantity", "value", "bound"], rows))
    written.append(p)
    for c in report.checks:
        for name, (header, trows) in c.tables.items():
            d = out / "checks" / c.id
            d.mkdir(parents=True, exist_ok=True)
            p = d / f"{name}.csv"
            p.write_text(_csv_text(header, trows))
            written.append(p)
    timings = {c.id: c.runtime for c in report.checks}
    (out / "timings.json").write_text(json.dumps(timings, indent=2, sort_keys=True) + "\n")
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="compgeom", description=__doc__.splitlines()[0])
    parser.add_argument("--list-scenarios", action="store_true",
                        help="print the bundled scenario names and exit")
    sub = parser.add_subparsers(dest="command")
    run = sub.add_parser("run", help="run a scenario")
    run.add_argument("config", nargs="?", help="config file or bundled scenario name")
    run.add_argument("--out", help=f"output root (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    run.add_argument("--seed", type=int, help="override the scenario seed")
    run.add_argument("--list-scenarios", action="store_true",
                     help="print the bundled scenario names and exit")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_scenarios:
        print("\n".join(bundled_scenarios()))
        return EXIT_OK
    if args.command != "run" or not args.config:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        config, base = load_config(args.config)
        report = run_scenario(config, base, args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    root = Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)
    out_dir = root / report.name
    try:
        emit_tables(report, out_dir)
    except OSError as exc:
        print(f"error: cannot write outputs to {out_dir}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for c in report.checks:
        key, val = _headline(c)
        print(f"{c.status:10s} {c.id:32s} {key}={_fmt(val)}")
    print(f"{report.name}: exit {report.exit_code}, outputs in {out_dir}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
