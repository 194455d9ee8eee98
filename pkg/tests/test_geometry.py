from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from microsupport.errors import DimensionMismatch, EmptyPolyhedronError
from microsupport.geometry import (
    ConicPiece,
    ConicSubset,
    ConvexCone,
    ConvexPolyhedron,
    CotangentPoint,
    LocallyClosedPolyhedralSet,
    PolyhedralSet,
    antipodal,
    covered_by_union,
    dist_to_convex,
    find_point,
    is_proper_cone,
    polar_cone,
    tangent_cone,
    tangent_cone_contains,
    unit_scaled,
)
from microsupport.geometry.arrangement import arrangement_cells

F = Fraction
small = st.integers(-4, 4)
vec2 = st.tuples(small, small)
row2 = st.tuples(vec2.filter(any), small)
polys = st.lists(row2, min_size=1, max_size=4).map(lambda rows: ConvexPolyhedron(2, tuple(rows)))
cones = st.lists(vec2.filter(any), min_size=0, max_size=3).map(lambda rows: ConvexCone(2, tuple(rows)))
SETTINGS = settings(max_examples=60, deadline=None)


# -- feasibility -----------------------------------------------------------


def test_find_point_strict_and_infeasible():
    p = find_point(2, ges=[((1, 0), 0)], gts=[((0, 1), 1)])
    assert p[0] >= 0 and p[1] > 1
    assert find_point(1, ges=[((1,), 1), ((-1,), 0)]) is None
    assert find_point(1, ges=[((1,), 0)], gts=[((-1,), 0)]) is None


def test_find_point_with_equalities():
    p = find_point(3, eqs=[((1, 1, 1), 3)], ges=[((1, 0, 0), 1), ((0, 1, 0), 1)], gts=[((0, 0, 1), 0)])
    assert sum(p) == 3 and p[0] >= 1 and p[1] >= 1 and p[2] > 0
    assert find_point(2, eqs=[((1, 0), 0), ((1, 0), 1)]) is None


@SETTINGS
@given(polys)
def test_witness_lies_in_polyhedron(p):
    if p.is_empty:
        assert p.witness is None
    else:
        assert p.contains(p.witness)
        assert p.contains(p.relative_interior_point)


# -- polyhedra --------------------------------------------------------------


def test_polyhedron_basics():
    box = ConvexPolyhedron.box((0, 0), (2, 1))
    assert box.is_bounded and box.dimension == 2
    assert sorted(box.vertices()) == [(0, 0), (0, 1), (2, 0), (2, 1)]
    seg = ConvexPolyhedron.from_equalities(2, [((0, 1), 0)], [((1, 0), 0), ((-1, 0), -1)])
    assert seg.dimension == 1 and box.contains_polyhedron(seg)
    assert ConvexPolyhedron.point((1, 2)).dimension == 0
    assert ConvexPolyhedron.empty(2).is_empty
    assert ConvexPolyhedron.whole(2).dimension == 2 and not ConvexPolyhedron.whole(2).is_bounded


def test_dimension_mismatch_raises():
    with pytest.raises(DimensionMismatch):
        ConvexCone(2, ((1, 0, 0),))
    with pytest.raises(DimensionMismatch):
        CotangentPoint((0, 0), (1,))


def test_tangent_cone_of_union():
    s = PolyhedralSet.of(ConvexPolyhedron(2, (((1, 0), 0),)), ConvexPolyhedron(2, (((0, 1), 0),)))
    cones_ = tangent_cone(s, (0, 0))
    assert tangent_cone_contains(cones_, (1, -5)) and tangent_cone_contains(cones_, (-5, 1))
    assert not tangent_cone_contains(cones_, (-1, -1))


def test_covered_by_union_half_planes():
    up, down = [((0, 1), 0)], [((0, -1), 0)]
    assert covered_by_union(2, [up, down])
    assert not covered_by_union(2, [up])
    assert covered_by_union(2, [up], ges=[((0, 1), 1)])


@SETTINGS
@given(polys, polys)
def test_same_set_is_symmetric_and_reflexive(a, b):
    sa, sb = PolyhedralSet.of(a), PolyhedralSet.of(b)
    assert sa.same_set(sa)
    assert sa.same_set(sb) == sb.same_set(sa)
    union = PolyhedralSet.of(a, b)
    assert union.contains_set(sa) and union.contains_set(sb)


@SETTINGS
@given(polys, vec2)
def test_distance_zero_iff_contained(p, x):
    if p.is_empty:
        with pytest.raises(EmptyPolyhedronError):
            dist_to_convex(x, p)
        return
    d, y, d_sq = dist_to_convex(x, p)
    assert p.contains(y)
    assert (d_sq == 0) == p.contains(x)
    # y is the nearest point: no vertex of a clipped copy is closer
    clipped = p.intersect(ConvexPolyhedron.box((-9, -9), (9, 9)))
    for v in clipped.vertices() + [p.witness]:
        assert sum((F(a) - b) ** 2 for a, b in zip(x, v)) >= d_sq


def test_locally_closed_disjointness():
    closed_ray = PolyhedralSet.of(ConvexPolyhedron(1, (((1,), 0),)))
    origin = PolyhedralSet.of(ConvexPolyhedron.point((0,)))
    open_ray = LocallyClosedPolyhedralSet(closed_ray, origin)
    point = LocallyClosedPolyhedralSet.closed(origin)
    assert open_ray.is_disjoint_from(point)
    assert not LocallyClosedPolyhedralSet.closed(closed_ray).is_disjoint_from(point)
    assert open_ray.removed_within_closure()
    assert not open_ray.contains((0,)) and open_ray.contains((1,))


# -- cones ------------------------------------------------------------------


@SETTINGS
@given(cones)
def test_polar_is_an_involution(c):
    assert polar_cone(polar_cone(c)).same_set(c)


@SETTINGS
@given(cones, vec2, vec2)
def test_polar_pairing_nonnegative(c, v, w):
    if c.contains(v) and polar_cone(c).contains(w):
        assert v[0] * w[0] + v[1] * w[1] >= 0


def test_proper_cones():
    assert is_proper_cone(ConvexCone.orthant(2))
    # the polar of {0} is everything, the polar of R^2 is {0}
    assert is_proper_cone(ConvexCone.zero(2))
    assert not is_proper_cone(ConvexCone.whole(2))
    assert not is_proper_cone(ConvexCone(2, ((1, 0),)))


def test_cone_generators_and_subspace():
    c = ConvexCone.generated_by([(1, 0), (1, 1)], 2)
    assert c.contains((2, 1)) and not c.contains((0, 1))
    span = ConvexCone.subspace([(1, 1)], 2)
    assert span.contains((-3, -3)) and not span.contains((1, 0))
    assert ConvexCone.zero(2).is_zero() and not c.is_zero()


# -- conic subsets ----------------------------------------------------------


def test_conic_membership_and_antipodal():
    piece = ConicPiece(ConvexPolyhedron.point((0, 0)), ConvexCone.orthant(2))
    a = ConicSubset(2, (piece,))
    assert a.contains(CotangentPoint((0, 0), (1, 2)))
    assert not a.contains(CotangentPoint((0, 0), (-1, 2)))
    b = antipodal(a)
    assert b.contains(CotangentPoint((0, 0), (-1, -2)))
    assert not b.same_set(a)
    assert antipodal(b).same_set(a)


def test_conic_product_and_projection():
    half = PolyhedralSet.of(ConvexPolyhedron(1, (((1,), 0),)))
    z = ConicSubset.zero_section(half)
    prod = z.product(z)
    assert prod.dim == 2
    assert prod.contains(CotangentPoint((1, 2), (0, 0)))
    assert prod.base_projection().same_set(half.product(half))


def test_conic_samples_are_members(rng):
    a = ConicSubset(2, (ConicPiece(ConvexPolyhedron(2, (((1, 0), 0),)), ConvexCone(2, ((0, 1), (0, -1), (1, 0)))),))
    pts = a.sample(rng, 200)
    assert len(pts) == 200 and all(a.contains(p) for p in pts)
    assert a.with_samples(pts).samples_consistent()


@SETTINGS
@given(vec2.filter(any))
def test_unit_scaled_keeps_direction(xi):
    u = unit_scaled(xi)
    assert u[0] * xi[1] == u[1] * xi[0]
    assert u[0] * xi[0] + u[1] * xi[1] > 0
    assert abs(float(u[0]) ** 2 + float(u[1]) ** 2 - 1) < 1e-9


# -- arrangement ------------------------------------------------------------


def test_arrangement_of_example_set():
    s = PolyhedralSet.of(ConvexPolyhedron(2, (((1, 0), 0),)), ConvexPolyhedron(2, (((0, 1), 0),)))
    cells = arrangement_cells(s)
    # two lines through the origin cut 4 quadrants, 4 rays and 1 vertex; the
    # open third quadrant is outside S
    assert len(cells) == 8
    assert sorted(c.dimension for c in cells) == [0, 1, 1, 1, 1, 2, 2, 2]
    for c in cells:
        assert c.closure.contains(c.witness)


@SETTINGS
@given(st.lists(row2, min_size=1, max_size=3))
def test_arrangement_cells_partition_the_set(rows):
    s = PolyhedralSet.of(ConvexPolyhedron(2, tuple(rows)))
    cells = arrangement_cells(s)
    for x in [(F(1, 3), F(-2, 7)), (0, 0), (2, 2), (-1, 3)]:
        assert sum(c.contains(x) for c in cells) == int(s.contains(x))
