"""Acceptance criteria, one test (or parametrized family) per criterion.

Each test is tagged with ``criterion(n, title)``; the terminal summary prints
one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from compgeom import angles as A
from compgeom import cli
from compgeom import comparison as cmp
from compgeom import counterexamples as cx
from compgeom import model_spaces as ms
from compgeom import variation as V
from compgeom.spaces import ModelSpace, TaxicabPlane, build_cube_surface, path_from_function
from oracles import plane_first_variation, sphere_first_variation

PLANE, SPHERE, HYPER = ModelSpace(0.0), ModelSpace(1.0), ModelSpace(-1.0)
MODELS = [PLANE, SPHERE, HYPER]
MODEL_IDS = ["plane", "sphere", "hyperbolic"]


def random_admissible_sides(rng, k):
    # the cap keeps the perimeter below twice the diameter
    cap = 0.3 * ms.diameter(k) if k > 0 else 3.0
    a, b = rng.uniform(1e-2, cap, size=2)
    c = rng.uniform(abs(a - b), a + b)
    return a, b, c


@pytest.mark.criterion(1, "comparison angle matches embedded vertex angle within 1e-9")
@pytest.mark.parametrize("k", [-1.0, 0.0, 1.0], ids=["negative", "zero", "positive"])
def test_comparison_kernel_round_trip(k, rng):
    worst = 0.0
    for _ in range(1000):
        sides = random_admissible_sides(rng, k)
        tri = cmp.embed_triangle(sides, k)
        worst = max(worst, abs(cmp.comparison_angle(sides, k)
                               - ms.vertex_angle(tri.x, tri.y, tri.z, k)))
    print(f"k={k}: worst angle mismatch {worst:.3e}")
    assert worst <= 1e-9


@pytest.mark.criterion(2, "thin-triangle residual <= 1e-2 at t=1e-3 and shrinking under halving")
@pytest.mark.parametrize("space", MODELS, ids=MODEL_IDS)
@pytest.mark.parametrize("alpha", [0.5, math.pi / 2, 2.5])
def test_thin_triangle_residual_rate(space, alpha):
    s = 1.0
    gamma, eta = space.ray(None, 0.0, 1.0), space.ray(None, alpha, 1.0)
    far = eta.at(s)
    residuals = []
    t = 1e-3
    for _ in range(9):
        d = space.distance(gamma.at(t), far)
        residuals.append(cmp.thin_triangle_residual(t, s, d, space.k))
        t /= 2
    print(f"residuals {residuals[0]:.3e} .. {residuals[-1]:.3e}")
    assert residuals[0] <= 1e-2
    assert all(r1 < r0 for r0, r1 in zip(residuals, residuals[1:]))


@pytest.mark.criterion(3, "taxicab diagonal vs axis: lower <= 1e-3, upper within 1e-2 of pi/2")
def test_taxicab_angles():
    space, gamma, eta = cx.diagonal_and_axis()
    est = A.estimate_angles(space, gamma, eta, 0.0)
    print(f"upper={est.upper:.6f} lower={est.lower:.3e}")
    assert est.lower <= 1e-3
    assert abs(est.upper - math.pi / 2) <= 1e-2


@pytest.mark.criterion(4, "taxicab triangles violate both curvature bounds for k in {-1,0,1}")
@pytest.mark.parametrize("k", [-1.0, 0.0, 1.0])
def test_taxicab_unbounded_curvature(k):
    space = TaxicabPlane()
    above = V.curvature_bound_test(space, (None, 1.0), k, "above", triangles=[cx.rectangle_triangle()])
    below = V.curvature_bound_test(space, (None, 1.0), k, "below", triangles=[cx.branching_triangle()])
    print(f"k={k}: excess above {above.worst_excess:.3f}, below {below.worst_excess:.3f}")
    assert above.violations > 0 and above.witnesses
    assert below.violations > 0 and below.witnesses


@pytest.mark.criterion(5, "sphere first variation toward a point within 1e-4 of -cos(alpha)")
@pytest.mark.parametrize("alpha", [0.0, math.pi / 6, math.pi / 3, math.pi / 2, 2 * math.pi / 3])
def test_first_variation_sphere_point(alpha):
    target = ms.point_at(ms.origin(1.0), 1.0, alpha, 1.0)
    rep = V.first_variation_check(SPHERE, SPHERE.ray(None, 0.0, 1.0),
                                  V.CompactSet.of(SPHERE, [target]))
    oracle = sphere_first_variation(alpha)
    assert oracle == pytest.approx(-math.cos(alpha), abs=1e-12)
    print(f"alpha={alpha:.4f}: limit {rep.limit_estimate:.9f} oracle {oracle:.9f}")
    assert abs(rep.limit_estimate - oracle) <= 1e-4
    assert rep.passed


@pytest.mark.criterion(6, "first variation toward a two-point set matches the min of branches")
def test_first_variation_plane_two_points():
    pts = [(1.0, 1.0), (1.0, -1.0)]
    rep = V.first_variation_check(PLANE, PLANE.ray(None, 0.0, 1.0), V.CompactSet.of(PLANE, pts))
    oracle = plane_first_variation(pts)
    assert oracle == pytest.approx(-math.cos(math.pi / 4), abs=1e-12)
    print(f"plane: limit {rep.limit_estimate:.12f} oracle {oracle:.12f}")
    assert abs(rep.limit_estimate - oracle) <= 1e-6
    assert len(rep.feet) == 2


@pytest.mark.criterion(6, "first variation toward a two-point set matches the min of branches")
@pytest.mark.parametrize("alphas", [(math.pi / 3, -2 * math.pi / 3), (0.4, 2.0), (2.2, -1.1)])
def test_first_variation_sphere_two_points(alphas):
    pts = [ms.point_at(ms.origin(1.0), 1.0, a, 1.0) for a in alphas]
    rep = V.first_variation_check(SPHERE, SPHERE.ray(None, 0.0, 1.0),
                                  V.CompactSet.of(SPHERE, pts))
    oracle = min(sphere_first_variation(a) for a in alphas)
    assert oracle == pytest.approx(-math.cos(min(abs(a) for a in alphas)), abs=1e-12)
    print(f"sphere {alphas}: limit {rep.limit_estimate:.9f} oracle {oracle:.9f}")
    assert abs(rep.limit_estimate - oracle) <= 1e-4


@pytest.mark.criterion(7, "monotone comparison angles: sphere nonincreasing, hyperbolic nondecreasing")
@pytest.mark.parametrize("space, direction", [(SPHERE, "nonincreasing"), (HYPER, "nondecreasing")],
                         ids=["sphere", "hyperbolic"])
@pytest.mark.parametrize("alpha", [0.7, 1.6, 2.8])
def test_monotonicity(space, direction, alpha):
    gamma, eta = space.ray(None, 0.0, 1.0), space.ray(None, alpha, 1.0)
    rep = A.monotonicity_check(space, gamma, eta, 0.0)
    grid = A.GridSchedule.for_paths(gamma, eta)
    assert rep.direction == direction
    assert np.array_equal(rep.ts, grid.sweep())
    assert rep.ts[0] == pytest.approx(grid.eps0 * 2.0 ** -11) and rep.ts[-1] == grid.eps0
    steps = np.diff(rep.angles)
    worst = float(np.max(steps if direction == "nonincreasing" else -steps))
    print(f"{direction}: {rep.n_violations} violations, worst step {worst:.3e}")
    assert rep.n_violations == 0
    assert worst <= 1e-9


@pytest.mark.criterion(8, "supplementary angles: sphere sums to pi, taxicab bifurcation does not")
@pytest.mark.parametrize("k", [0.0, 1.0])
def test_supplementary_sphere(k):
    gamma = path_from_function(SPHERE, lambda t: (math.cos(t - 1.0), math.sin(t - 1.0), 0.0), 2.0)
    sigma = SPHERE.shortest_path((1.0, 0.0, 0.0), (0.0, 0.0, 1.0), 1e-2)
    rep = A.supplementary_angles_check(SPHERE, gamma, 1.0, sigma, k)
    print(f"k={k}: total {rep.total:.12f}")
    assert abs(rep.total - math.pi) <= 1e-6
    assert rep.passed


@pytest.mark.criterion(8, "supplementary angles: sphere sums to pi, taxicab bifurcation does not")
def test_supplementary_taxicab_designed_failure():
    space, gamma, t_mid, sigma = cx.bifurcation()
    rep = A.supplementary_angles_check(space, gamma, t_mid, sigma, 0.0)
    print(f"taxicab total {rep.total:.6f}")
    assert not rep.passed
    assert abs(rep.total - math.pi) >= 1.0


def analytic_pairs():
    pairs = []
    for space, name in zip(MODELS, MODEL_IDS):
        for alpha in (0.0, math.pi / 3, 1.9, math.pi):
            pairs.append(pytest.param(space, space.ray(None, 0.0, 1.0), space.ray(None, alpha, 1.0),
                                      id=f"{name}-{alpha:.2f}"))
    space, g, e = cx.diagonal_and_axis()
    pairs.append(pytest.param(space, g, e, id="taxicab-diagonal-axis"))
    space, g, e = cx.diagonal_and_axis(unit_speed=True)
    pairs.append(pytest.param(space, g, e, id="taxicab-unit-speed"))
    return pairs


@pytest.mark.criterion(9, "angle estimates agree across k in {-1,0,1} within 1e-4")
@pytest.mark.parametrize("space, gamma, eta", analytic_pairs())
def test_k_independence(space, gamma, eta):
    rep = A.k_independence_check(space, gamma, eta, tol=1e-4)
    print(f"spread upper {rep.spread_upper:.3e} lower {rep.spread_lower:.3e}")
    assert rep.spread_upper <= 1e-4 and rep.spread_lower <= 1e-4


@pytest.mark.criterion(9, "angle estimates agree across k in {-1,0,1} within 1e-4")
def test_k_independence_bundled_scenarios():
    for name in cli.bundled_scenarios():
        report = cli.run_scenario(*cli.load_config(name))
        for c in report.checks:
            if c.op == "k_independence_check":
                assert c.status == "pass", (name, c.id, c.payload)


CUBE_PAIRS = [((0.21, 0.13, 0.0), (0.77, 1.0, 0.58)),
              ((0.3, 0.4, 0.0), (1.0, 0.7, 0.6)),
              ((0.1, 0.35, 0.0), (0.62, 0.27, 1.0))]


@pytest.mark.criterion(10, "cube distances nondecreasing in level and Cauchy with halving gaps")
@pytest.mark.parametrize("p, q", CUBE_PAIRS, ids=["adjacent-a", "adjacent-b", "opposite"])
def test_cube_refinement(p, q):
    levels = range(0, 8)
    ds = np.array([build_cube_surface(1.0, L).distance(p, q) for L in levels])
    gaps = np.abs(np.diff(ds))
    print("distances", " ".join(f"{d:.10f}" for d in ds))
    print("gaps     ", " ".join(f"{g:.3e}" for g in gaps))
    assert np.all(np.diff(ds) >= -1e-12), "distance decreased under refinement"
    for L in range(3, len(gaps) - 1):
        assert gaps[L + 1] <= gaps[L] / 2, f"gap did not halve from level {L + 1} to {L + 2}"


@pytest.mark.criterion(11, "bundled scenarios reproduce byte-identical CSV outputs")
@pytest.mark.parametrize("name", cli.bundled_scenarios())
def test_determinism(name, tmp_path):
    outputs = []
    for run in ("first", "second"):
        config, base = cli.load_config(name)
        report = cli.run_scenario(config, base, seed=1234)
        out = tmp_path / run
        cli.emit_tables(report, out)
        outputs.append({p.relative_to(out): p.read_bytes()
                        for p in sorted(out.rglob("*")) if p.suffix in (".csv", ".json")
                        and p.name != "timings.json"})
    assert any(str(p).endswith(".csv") for p in outputs[0])
    assert outputs[0] == outputs[1]
