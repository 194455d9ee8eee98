"""Exact rational polyhedral and conic primitives."""
from .cones import ConvexCone, cone_rows_from_generators, is_proper_cone, polar_cone
from .conic import ConicPiece, ConicSubset, CotangentPoint, antipodal, conic_membership, unit_scaled
from .feasibility import find_point, is_feasible
from .polyhedra import (
    ConvexPolyhedron,
    LocallyClosedPolyhedralSet,
    PolyhedralSet,
    covered_by_union,
    dist_to_convex,
)
from .sampling import SampledCone, normal_cone_pair_sampled, sample_conic, sample_cone, sample_polyhedron


def tangent_cone(s, x):
    """Tangent cone ``C_x(S)`` of a polyhedral set as a list of convex cones."""
    return s.tangent_cone(x)


def tangent_cone_contains(cones, v):
    return any(c.contains(v) for c in cones)


__all__ = [
    "ConicPiece",
    "ConicSubset",
    "ConvexCone",
    "ConvexPolyhedron",
    "CotangentPoint",
    "LocallyClosedPolyhedralSet",
    "PolyhedralSet",
    "SampledCone",
    "antipodal",
    "cone_rows_from_generators",
    "conic_membership",
    "covered_by_union",
    "dist_to_convex",
    "find_point",
    "is_feasible",
    "is_proper_cone",
    "normal_cone_pair_sampled",
    "polar_cone",
    "sample_cone",
    "sample_conic",
    "sample_polyhedron",
    "tangent_cone",
    "tangent_cone_contains",
    "unit_scaled",
]
