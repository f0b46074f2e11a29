from __future__ import annotations

import math

import numpy as np
import pytest

from compgeom import angles as A
from compgeom import counterexamples as cx
from compgeom import model_spaces as ms
from compgeom.spaces import ModelSpace, TaxicabPlane, path_from_function
from oracles import law_of_cosines_angle, opposite_side

PLANE = ModelSpace(0.0)
SPHERE = ModelSpace(1.0)
HYPER = ModelSpace(-1.0)


def test_grid_schedule_validation():
    for bad in (dict(eps0=0.0), dict(eps0=1, factor=1.0), dict(eps0=1, levels=1),
                dict(eps0=1, samples_per_level=1), dict(eps0=1, span=0.0)):
        with pytest.raises(ValueError):
            A.GridSchedule(**bad)


def test_grid_samples_lie_in_level_interval():
    g = A.GridSchedule(eps0=0.5)
    for j in range(g.levels):
        s = g.samples(j)
        eps = 0.5 * 0.5 ** j
        assert s.max() == pytest.approx(eps) and s.min() == pytest.approx(eps * g.span)
        assert np.all(np.diff(s) > 0)


def test_default_grid_from_paths():
    g = A.GridSchedule.for_paths(PLANE.ray(None, 0, 1.0), PLANE.ray(None, 1, 0.4))
    assert g.eps0 == pytest.approx(0.1)
    assert (g.factor, g.levels, g.samples_per_level) == (0.5, 12, 32)


def test_plane_perpendicular_rays():
    est = A.estimate_angles(PLANE, PLANE.ray(None, 0, 1), PLANE.ray(None, math.pi / 2, 1), 0.0)
    assert est.upper == pytest.approx(math.pi / 2, abs=1e-6)
    assert est.lower == pytest.approx(math.pi / 2, abs=1e-6)


def test_taxicab_upper_and_lower():
    space, g, e = cx.diagonal_and_axis()
    est = A.estimate_angles(space, g, e, 0.0)
    assert est.lower <= 1e-3
    assert abs(est.upper - math.pi / 2) <= 1e-2


def test_identical_paths_zero_angle():
    for space, path in ((PLANE, PLANE.ray(None, 0.3, 1)), (SPHERE, SPHERE.ray(None, 1.0, 1)),
                        (TaxicabPlane(), cx.diagonal_and_axis()[1])):
        est = A.estimate_angles(space, path, path, 0.0)
        assert est.upper == 0.0 and est.lower == 0.0


def test_per_level_envelopes_monotone():
    space, g, e = cx.diagonal_and_axis()
    for s_, gg, ee in ((space, g, e), (SPHERE, SPHERE.ray(None, 0, 1), SPHERE.ray(None, 2, 1))):
        est = A.estimate_angles(s_, gg, ee, 0.0)
        sups = [r[1] for r in est.per_level]
        infs = [r[2] for r in est.per_level]
        assert np.all(np.diff(sups) <= 0) and np.all(np.diff(infs) >= 0)
        assert est.lower <= est.upper + 1e-12


def test_mismatched_origins_rejected():
    g = PLANE.ray(None, 0, 1)
    e = PLANE.ray(ms.ModelPoint.plane(0.5, 0.0), 1.0, 1)
    with pytest.raises(ValueError):
        A.estimate_angles(PLANE, g, e, 0.0)


def test_eps_beyond_domain_rejected():
    g, e = PLANE.ray(None, 0, 1), PLANE.ray(None, 1, 1)
    with pytest.raises(ValueError):
        A.estimate_angles(PLANE, g, e, 0.0, A.GridSchedule(eps0=2.0))


@pytest.mark.parametrize("space", [PLANE, SPHERE, HYPER], ids=["plane", "sphere", "hyperbolic"])
@pytest.mark.parametrize("alpha", [0.4, 1.3, 2.9])
def test_rays_reproduce_vertex_angle(space, alpha):
    base = ms.from_polar(0.2, 0.7, space.k)
    g, e = space.ray(base, 0.1, 1.0), space.ray(base, 0.1 + alpha, 1.0)
    exact = ms.vertex_angle(base, g.at(0.5), e.at(0.5), space.k)
    est = A.estimate_angles(space, g, e, 0.0)
    assert est.upper == pytest.approx(exact, abs=1e-6)
    assert est.lower == pytest.approx(exact, abs=1e-6)


@pytest.mark.parametrize("space, direction", [(SPHERE, "nonincreasing"),
                                              (HYPER, "nondecreasing"),
                                              (PLANE, "constant")])
def test_monotonicity_directions(space, direction):
    g, e = space.ray(None, 0.0, 1.0), space.ray(None, 1.2, 1.0)
    rep = A.monotonicity_check(space, g, e, 0.0)
    assert rep.direction == direction
    assert rep.passed, rep.worst_violation
    # values match the law of cosines in the space, then compared in the plane
    for t, theta in zip(rep.ts[::40], rep.angles[::40]):
        d = opposite_side(t, rep.s0, 1.2, space.k)
        assert theta == pytest.approx(law_of_cosines_angle(t, rep.s0, d, 0.0), abs=1e-7)


def test_monotonicity_requires_curvature_bound():
    space, g, e = cx.diagonal_and_axis()
    with pytest.raises(ValueError):
        A.monotonicity_check(space, g, e, 0.0)


def test_monotonicity_detects_wrong_direction():
    # the sphere compared against k = 2 is bounded above by k: nondecreasing expected,
    # and comparing against k = 0 while claiming an upper bound must fail
    g, e = SPHERE.ray(None, 0.0, 1.0), SPHERE.ray(None, 1.2, 1.0)
    assert A.monotonicity_check(SPHERE, g, e, 2.0).passed
    rep = A._curvature_direction(SPHERE, 2.0)
    assert rep == "nondecreasing"


@pytest.mark.parametrize("space, angles_deg", [(PLANE, (0, 30, 70)), (SPHERE, (10, 55, 140)),
                                               (HYPER, (0, 90, 100))])
def test_angle_triangle_inequality(space, angles_deg):
    g, s, e = (space.ray(None, math.radians(a), 1.0) for a in angles_deg)
    rep = A.angle_triangle_inequality_check(space, g, e, s, 0.0)
    assert rep.passed
    assert rep.margin == pytest.approx(0.0, abs=1e-6)


def test_angle_triangle_inequality_degenerate():
    g, e = PLANE.ray(None, 0.0, 1.0), PLANE.ray(None, 1.0, 1.0)
    rep = A.angle_triangle_inequality_check(PLANE, g, e, g, 0.0)
    assert rep.passed and rep.margin == pytest.approx(0.0, abs=1e-12)


def test_supplementary_plane():
    gamma = PLANE.ray(ms.ModelPoint.plane(-1.0, 0.0), 0.0, 2.0)
    sigma = PLANE.ray(None, math.pi / 3, 1.0)
    rep = A.supplementary_angles_check(PLANE, gamma, 1.0, sigma, 0.0)
    assert rep.forward.upper == pytest.approx(math.pi / 3, abs=1e-6)
    assert rep.backward.upper == pytest.approx(2 * math.pi / 3, abs=1e-6)
    assert rep.passed


def test_supplementary_taxicab_fails_by_design():
    space, gamma, t_mid, sigma = cx.bifurcation()
    rep = A.supplementary_angles_check(space, gamma, t_mid, sigma, 0.0)
    assert rep.total == pytest.approx(2 * math.pi, abs=1e-9)
    assert not rep.passed


def test_supplementary_endpoint_rejected():
    gamma = PLANE.ray(None, 0.0, 2.0)
    with pytest.raises(ValueError):
        A.supplementary_angles_check(PLANE, gamma, 0.0, PLANE.ray(None, 1.0, 1.0))


def test_k_independence_plane_pi_over_3():
    rep = A.k_independence_check(PLANE, PLANE.ray(None, 0, 1), PLANE.ray(None, math.pi / 3, 1))
    assert rep.spread_upper <= 1e-6 and rep.spread_lower <= 1e-6


def test_k_independence_taxicab_pair():
    space, g, e = cx.diagonal_and_axis()
    rep = A.k_independence_check(space, g, e)
    assert rep.passed
    for est in rep.estimates:
        assert abs(est.upper - math.pi / 2) <= 1e-2


def test_k_independence_identical_paths():
    g = SPHERE.ray(None, 0.5, 1.0)
    rep = A.k_independence_check(SPHERE, g, g)
    assert all(e.upper == 0.0 and e.lower == 0.0 for e in rep.estimates)


def test_diagonal_limit_examples():
    assert A.diagonal_limit_check(lambda x, y: x + y).passed
    ratio = A.diagonal_limit_check(lambda x, y: min(x, y) / max(x, y))
    assert not ratio.passed and ratio.final_gap > 0.9
    est = A.estimate_angles(SPHERE, SPHERE.ray(None, 0, 1), SPHERE.ray(None, 1, 1), 0.0)
    from_grids = A.diagonal_limit_check(est.grids)
    assert from_grids.passed and from_grids.final_gap < 1e-6


@pytest.mark.parametrize("space", [PLANE, SPHERE, HYPER], ids=["plane", "sphere", "hyperbolic"])
def test_strong_angle(space):
    g, e = space.ray(None, 0.0, 1.0), space.ray(None, 2.0, 1.0)
    for s in (0.05, 0.2, 0.9):
        assert A.strong_angle_check(space, g, e, s, 0.0).passed


@pytest.mark.parametrize("space", [PLANE, SPHERE, HYPER], ids=["plane", "sphere", "hyperbolic"])
def test_thin_triangle_rate_on_grid(space):
    alpha = 1.1
    g = space.ray(None, 0.0, 1.0)
    e = space.ray(None, alpha, 1.0)
    grid = A.GridSchedule.for_paths(g, e)
    s = 0.8
    for t in grid.samples(grid.levels - 1):
        d = space.distance(g.at(t), e.at(s))
        theta = A.angle_grid(space, g.start, g, e, np.array([t]), np.array([s]), space.k)[0, 0]
        assert abs(math.cos(theta) - (s - d) / t) <= 10 * t


def test_non_unit_speed_paths_accepted():
    space = TaxicabPlane()
    fast = path_from_function(space, lambda t: (t, t), 1.0)
    slow = path_from_function(space, lambda t: (t / 2, t / 2), 2.0)
    e = path_from_function(space, lambda s: (s, 0.0), 1.0)
    a = A.estimate_angles(space, fast, e, 0.0)
    b = A.estimate_angles(space, slow, e, 0.0)
    assert a.lower == b.lower == 0.0
    assert abs(a.upper - math.pi / 2) < 1e-2 and abs(b.upper - math.pi / 2) < 1e-2


def test_sweep_spans_level_scales():
    g = A.GridSchedule(eps0=0.5)
    ts = g.sweep()
    assert ts[0] == pytest.approx(g.level_eps()[-1]) and ts[-1] == 0.5
    assert set(ts) <= set(g.all_samples())
    assert np.all(np.diff(ts) > 0)
