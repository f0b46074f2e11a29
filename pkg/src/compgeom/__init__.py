"""Numerical comparison geometry: model planes, comparison triangles, upper
and lower angles, and first-variation checks of distance to compact sets."""

from .angles import AngleEstimate, GridSchedule, estimate_angles
from .comparison import TriangleSides, comparison_angle, embed_triangle
from .model_spaces import ModelPoint, diameter, model_distance
from .spaces import (
    CubeSurface,
    GraphSpace,
    MetricGraph,
    ModelSpace,
    SampledPath,
    TaxicabPlane,
    arc_length_reparam,
    build_cube_surface,
    path_length,
    shortest_path,
)
from .variation import CompactSet, distance_to_set, first_variation_check

__version__ = "0.1.0"

__all__ = [
    "AngleEstimate", "CompactSet", "CubeSurface", "GraphSpace", "GridSchedule", "MetricGraph",
    "ModelPoint", "ModelSpace", "SampledPath", "TaxicabPlane", "TriangleSides",
    "arc_length_reparam", "build_cube_surface", "comparison_angle", "diameter",
    "distance_to_set", "embed_triangle", "estimate_angles", "first_variation_check",
    "model_distance", "path_length", "shortest_path",
]
