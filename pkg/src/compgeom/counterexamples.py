"""Taxicab-plane configurations where the comparison properties break down."""

from __future__ import annotations

from .spaces import SampledPath, TaxicabPlane, path_from_function, polyline_path
from .variation import Triangle

RESOLUTION = 1e-3


def diagonal_and_axis(unit_speed: bool = False) -> tuple[TaxicabPlane, SampledPath, SampledPath]:
    """Diagonal (t, t) and x-axis (s, 0) from the origin, both on [0, 1].

    Both are shortest paths; their lower angle is 0 and their upper angle pi/2.
    The diagonal has speed 2 unless ``unit_speed`` rescales it to (t/2, t/2)
    on [0, 2]; the angles do not depend on the choice.
    """
    space = TaxicabPlane()
    if unit_speed:
        gamma = path_from_function(space, lambda t: (t / 2, t / 2), 2.0, resolution=RESOLUTION)
    else:
        gamma = path_from_function(space, lambda t: (t, t), 1.0, resolution=RESOLUTION)
    eta = path_from_function(space, lambda s: (s, 0.0), 1.0, resolution=RESOLUTION)
    return space, gamma, eta


def rectangle_triangle() -> Triangle:
    """Equilateral (side 1) triangle whose sides to the apex run around a rectangle.

    Comparison points on the two legs end up farther apart than in any model
    plane, so the space is not curvature-bounded above.
    """
    space = TaxicabPlane()
    x, y, z = (0.0, 0.0), (1.0, 0.0), (0.5, 0.5)
    return Triangle(x, y, z, {
        "xy": polyline_path(space, [x, y], RESOLUTION),
        "xz": polyline_path(space, [x, (0.0, 0.5), z], RESOLUTION),
        "yz": polyline_path(space, [y, (1.0, 0.5), z], RESOLUTION),
    })


def branching_triangle() -> Triangle:
    """Equilateral (side 1) triangle whose legs share the segment from the apex down to
    (0.5, 0) before branching; coinciding points have positive comparison distance,
    so the space is not curvature-bounded below."""
    space = TaxicabPlane()
    x, y, z = (0.0, 0.0), (1.0, 0.0), (0.5, 0.5)
    fork = (0.5, 0.0)
    return Triangle(x, y, z, {
        "xy": polyline_path(space, [x, y], RESOLUTION),
        "xz": polyline_path(space, [x, fork, z], RESOLUTION),
        "yz": polyline_path(space, [y, fork, z], RESOLUTION),
    })


def bifurcation() -> tuple[TaxicabPlane, SampledPath, float, SampledPath]:
    """Shortest path along the x-axis through the origin and a vertical branch there.

    Both halves of the axis meet the branch at comparison angle pi, so the
    adjacent angles sum to 2*pi instead of pi.
    """
    space = TaxicabPlane()
    gamma = polyline_path(space, [(-1.0, 0.0), (1.0, 0.0)], RESOLUTION)
    sigma = polyline_path(space, [(0.0, 0.0), (0.0, 1.0)], RESOLUTION)
    return space, gamma, 1.0, sigma
