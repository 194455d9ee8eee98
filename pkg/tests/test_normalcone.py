import math
import random
from fractions import Fraction

import pytest
from catalog import CATALOG, CONORMAL_OF
from conftest import random_bounded_set, random_polyhedron, random_set

from microsupport import worked
from microsupport.errors import DimensionMismatch, NotInSetError, ParameterError, PreconditionError
from microsupport.geometry import (
    ConicPiece,
    ConicSubset,
    ConvexCone,
    ConvexPolyhedron,
    CotangentPoint,
    PolyhedralSet,
    conic_membership,
    dist_to_convex,
    normal_cone_pair_sampled,
)
from microsupport.normalcone import (
    AffineMap,
    BallTestParams,
    Neighborhood,
    SweepParams,
    ball_test_report,
    conormal0,
    conormal0_ball_test,
    conormal0_halfspace_test,
    embed_conormal,
    min_principle_check,
    openness_criterion,
    proper_cone_probe,
    sweep_support_search,
    sweep_support_trace,
)
from microsupport.sheaf import example_set
from microsupport.symplectic import ScalarField

F = Fraction
S = example_set()


def half_line():
    return PolyhedralSet.of(ConvexPolyhedron(1, (((1,), 0),)))


# -- characterizations --------------------------------------------------------


@pytest.mark.parametrize(
    "x, xi, expected",
    [((1, 1), (0, 0), True), ((-1, 0), (0, 1), True), ((0, 0), (1, 1), False), ((0, -1), (1, 0), True),
     ((0, -1), (-1, 0), False), ((3, 3), (1, 0), False)],
)
def test_halfspace_and_ball_on_example(x, xi, expected):
    assert conormal0_halfspace_test(S, x, xi) is expected
    assert conormal0_ball_test(S, x, xi) is expected


def test_ball_test_on_half_line():
    assert conormal0_ball_test(half_line(), (0,), (1,))
    assert not conormal0_ball_test(half_line(), (0,), (-1,))
    assert ball_test_report(half_line(), (0,), (0,))["reason"] == "zero-covector"
    rep = ball_test_report(half_line(), (0,), (1,))
    assert rep["reason"] == "exterior-ball" and rep["t"] > 0


def test_point_outside_set_is_rejected():
    with pytest.raises(NotInSetError):
        conormal0_halfspace_test(S, (-1, -1), (1, 0))
    with pytest.raises(NotInSetError):
        conormal0_ball_test(S, (-1, -1), (1, 0))
    with pytest.raises(DimensionMismatch):
        conormal0_ball_test(S, (0,), (1,))


def test_ball_params_validation():
    with pytest.raises(ParameterError):
        BallTestParams(t_grid=())
    with pytest.raises(ParameterError):
        BallTestParams(t_grid=(F(1, 4), F(1, 2)))
    with pytest.raises(ParameterError):
        BallTestParams(t_grid=(1, -1))
    with pytest.raises(ParameterError):
        BallTestParams(mode="approximate")


def test_floating_and_strict_modes_agree_on_example():
    flo = BallTestParams(mode="floating")
    strict = BallTestParams(strict=True)
    for x, xi in [((-1, 0), (0, 1)), ((0, 0), (1, 1)), ((0, 0), (-1, -1)), ((0, -2), (1, 0))]:
        exact = conormal0_ball_test(S, x, xi)
        assert conormal0_ball_test(S, x, xi, flo) == exact
        assert conormal0_ball_test(S, x, xi, strict) == exact


def test_strict_mode_certifies_when_grid_is_too_coarse():
    # with t = 100 the ball below the origin reaches the far slab; locally the covector is fine
    s = PolyhedralSet.of(ConvexPolyhedron(2, (((0, 1), 0),)), ConvexPolyhedron(2, (((0, -1), 150),)))
    coarse = BallTestParams(t_grid=(F(100),))
    assert not conormal0_ball_test(s, (0, 0), (0, -1), coarse)
    assert conormal0_ball_test(s, (0, 0), (0, 1))
    assert not conormal0_ball_test(s, (0, 0), (0, 1), coarse)
    rep = ball_test_report(s, (0, 0), (0, 1), BallTestParams(t_grid=(F(100),), strict=True))
    assert rep == {"verdict": True, "reason": "halfspace-certified", "t": None}


# -- exact descriptor ---------------------------------------------------------


def test_conormal0_examples():
    assert conormal0(PolyhedralSet.whole(2)).same_set(ConicSubset.zero_section(PolyhedralSet.whole(2)))
    assert conormal0(S).same_set(worked.example_conormal())
    line = PolyhedralSet.of(ConvexPolyhedron(2, (((1, 0), 0), ((-1, 0), 0))))
    assert conormal0(line).same_set(worked.line_conormal())
    assert conormal0(PolyhedralSet.empty(2)).is_empty


@pytest.mark.parametrize("name", sorted(CONORMAL_OF))
def test_conormal0_matches_hand_descriptors(name):
    assert conormal0(CONORMAL_OF[name]()).same_set(CATALOG[name][0]())


def test_conic_membership_on_example():
    n = worked.example_conormal()
    assert conic_membership(n, CotangentPoint((-1, 0), (0, 1)))
    assert not conic_membership(n, CotangentPoint((0, 0), (1, 1)))
    assert not conic_membership(n, CotangentPoint((-1, -1), (0, 0)))


def test_projection_and_zero_section(rng):
    for _ in range(15):
        s = random_set(rng)
        n = conormal0(s)
        assert n.base_projection().same_set(s)
        assert n.contains_subset(ConicSubset.zero_section(s))


def test_membership_is_conic(rng):
    for _ in range(10):
        s = random_set(rng)
        n = conormal0(s)
        for _ in range(100):
            x = tuple(F(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(2))
            xi = tuple(F(rng.randint(-3, 3)) for _ in range(2))
            lam = F(rng.randint(1, 50), rng.randint(1, 7))
            p = CotangentPoint(x, xi)
            assert n.contains(p) == n.contains(p.scaled(lam))


def test_halfspace_test_matches_descriptor(rng):
    for _ in range(10):
        s = random_set(rng)
        n = conormal0(s)
        for piece in s.nonempty_pieces:
            x = piece.witness
            for _ in range(10):
                xi = tuple(F(rng.randint(-3, 3)) for _ in range(2))
                assert n.contains(CotangentPoint(x, xi)) == conormal0_halfspace_test(s, x, xi)


def test_openness_criterion():
    assert openness_criterion(PolyhedralSet.whole(2))
    assert openness_criterion(PolyhedralSet.empty(2))
    assert not openness_criterion(CONORMAL_OF["half-plane"]())


# -- distance and tangent cones ----------------------------------------------


def test_dist_examples():
    half = ConvexPolyhedron(2, (((-1, 0), 0),))
    d, y, d_sq = dist_to_convex((3, 5), half)
    assert y == (0, 5) and d_sq == 9 and d == 3
    neg = ConvexPolyhedron(2, (((-1, 0), 0), ((0, -1), 0)))
    d, y, d_sq = dist_to_convex((1, 2), neg)
    assert y == (0, 0) and d_sq == 5 and math.isclose(d, math.sqrt(5))
    assert dist_to_convex((-1, -1), neg)[2] == 0


def test_dist_variational_inequality(rng):
    for _ in range(40):
        box = ConvexPolyhedron.box((-5, -5), (5, 5))
        p = random_polyhedron(rng).intersect(box)
        if p.is_empty:
            continue
        x = tuple(F(rng.randint(-12, 12), rng.randint(1, 3)) for _ in range(2))
        _, y, _ = dist_to_convex(x, p)
        for z in p.vertices():
            assert sum((a - b) * (c - b) for a, b, c in zip(x, y, z)) <= 0


def _directions(n, count=64):
    if n == 2:
        return [(math.cos(2 * math.pi * k / count), math.sin(2 * math.pi * k / count)) for k in range(count)]
    r = random.Random(3)
    out = []
    while len(out) < count:
        v = [r.gauss(0, 1) for _ in range(n)]
        nv = math.sqrt(sum(a * a for a in v))
        out.append(tuple(a / nv for a in v))
    return out


def _interior_margin(piece, x, d):
    rows = [a for a, _ in piece.active_rows(x)]
    if not rows:
        return 1.0
    return min(sum(float(ai) * di for ai, di in zip(a, d)) / math.sqrt(sum(float(ai) ** 2 for ai in a)) for a in rows)


@pytest.mark.parametrize("n", [2, 3])
def test_tangent_cone_matches_sampled_pair_cone(n):
    rng = random.Random(40 + n)
    for _ in range(25):
        s = random_set(rng, n=n, max_pieces=2)
        piece = rng.choice(s.nonempty_pieces)
        # a boundary point when there is one, so the tangent cone is not everything
        face = piece.add_rows([(tuple(-v for v in piece.halfspaces[0][0]), -piece.halfspaces[0][1])])
        x = face.witness if not face.is_empty else piece.witness
        point = PolyhedralSet.of(ConvexPolyhedron.point(x))
        sampled = normal_cone_pair_sampled(s, point, x, 1200, rng)
        cones = s.tangent_cone(x)
        assert all(any(c.contains(v) for c in cones) for v in sampled.vectors)
        for d in _directions(n):
            if any(p.contains(x) and _interior_margin(p, x, d) > 0.3 for p in s.nonempty_pieces):
                assert sampled.near(d, cos_tol=0.9), (s, x, d)


# -- embeddings and products --------------------------------------------------


def test_embed_examples():
    ident = AffineMap(((1, 0), (0, 1)), (0, 0))
    assert embed_conormal(S, ident).same_set(conormal0(S))
    origin = PolyhedralSet.of(ConvexPolyhedron.point((0,)))
    into_plane = AffineMap(((1,), (0,)), (0, 0))
    want = ConicSubset(2, (ConicPiece(ConvexPolyhedron.point((0, 0)), ConvexCone.whole(2)),))
    assert embed_conormal(origin, into_plane).same_set(want)
    diag = AffineMap(((1,), (1,)), (0, 0))
    assert embed_conormal(half_line(), diag).same_set(conormal0(diag.image(half_line())))


def test_embed_rejects_bad_maps():
    with pytest.raises(ParameterError):
        embed_conormal(S, AffineMap(((1, 1), (1, 1)), (0, 0)))
    with pytest.raises(DimensionMismatch):
        embed_conormal(half_line(), AffineMap(((1, 0), (0, 1)), (0, 0)))


def test_product_formula_small():
    prod = conormal0(half_line().product(half_line()))
    assert prod.same_set(conormal0(half_line()).product(conormal0(half_line())))
    assert prod.same_set(CATALOG["quadrant"][0]())


# -- minimum principle and proper cones ---------------------------------------


def test_min_principle_examples():
    s = PolyhedralSet.of(ConvexPolyhedron(2, (((1, 0), 0 + 1),)))
    v = min_principle_check(ScalarField.parse("x1**2 + x2**2", 2), s)
    assert v.minimizer == (1, 0) and v.covector == (2, 0) and v.holds and v.in_conormal
    half = PolyhedralSet.of(ConvexPolyhedron(2, (((1, 2), 3),)))
    v = min_principle_check(ScalarField.parse("x1 + 2*x2", 2), half)
    assert v.holds and v.covector == (1, 2) and v.min_value == 3
    v = min_principle_check(ScalarField.parse("5", 2), S)
    assert v.holds and v.covector == (0, 0)


def test_min_principle_unbounded():
    with pytest.raises(PreconditionError) as err:
        min_principle_check(ScalarField.parse("x1", 2), S)
    assert err.value.code == "unbounded"


def test_min_principle_rejects_cubic():
    with pytest.raises(PreconditionError):
        min_principle_check(ScalarField.parse("x1**3", 2), S)


def test_min_principle_with_threshold():
    box = PolyhedralSet.of(ConvexPolyhedron.box((0, 0), (1, 1)))
    v = min_principle_check(ScalarField.parse("(x1 - 3)**2 + x2**2", 2), box, c=-1)
    assert v.holds and v.in_conormal and not v.below_c
    assert v.to_json()["minimizer"] == ["1", "0"]


def test_proper_cone_probe_examples(rng):
    square = PolyhedralSet.of(ConvexPolyhedron.box((0, 0), (1, 1)))
    w = proper_cone_probe(square, ConvexCone.orthant(2))
    assert w.x == (0, 0) and w.xi == (1, 1)
    assert proper_cone_probe(PolyhedralSet.empty(2), ConvexCone.orthant(2)) == "empty"
    pt = PolyhedralSet.of(ConvexPolyhedron.point((1, 2)))
    w = proper_cone_probe(pt, ConvexCone.orthant(2))
    assert w.x == (1, 2) and ConvexCone.orthant(2).polar().in_interior(w.xi)
    for _ in range(10):
        s = random_bounded_set(rng)
        w = proper_cone_probe(s, ConvexCone(2, ((1, 3), (3, 1))))
        assert conormal0(s).contains(w)


def test_proper_cone_probe_errors():
    with pytest.raises(ParameterError):
        proper_cone_probe(S, ConvexCone(2, ((1, 0),)))
    with pytest.raises(PreconditionError):
        proper_cone_probe(S, ConvexCone.orthant(2))


# -- sweep --------------------------------------------------------------------


def test_sweep_on_example():
    p = CotangentPoint((-1, 0), (0, 1))
    q = sweep_support_search(S, p)
    assert conormal0_ball_test(S, q.x, q.xi)
    assert Neighborhood().contains(p, q)
    res = sweep_support_trace(S, CotangentPoint((0, -2), (1, 0)))
    assert res.c_low < res.c_high
    assert conormal0_ball_test(S, res.point.x, res.point.xi)


def test_sweep_below_wedge_vertex():
    wedge = CONORMAL_OF["wedge"]()
    q = sweep_support_search(wedge, CotangentPoint((0, 0), (0, 1)))
    assert conormal0_ball_test(wedge, q.x, q.xi)


def test_sweep_preconditions():
    with pytest.raises(PreconditionError) as err:
        sweep_support_search(S, CotangentPoint((1, 1), (0, 0)))
    assert err.value.code == "zero-covector"
    with pytest.raises(PreconditionError) as err:
        sweep_support_search(S, CotangentPoint((0, 0), (1, 1)))
    assert err.value.code == "hypothesis-violated"


def test_sweep_params_validation():
    orth = ConvexCone(2, ((1, 1), (-1, 1)))  # {v2 >= |v1|}
    SweepParams(orth, F(1, 10), (0, 1), F(1, 10), F(1, 10))
    with pytest.raises(ParameterError):
        SweepParams(orth, F(0), (0, 1), F(1, 10), F(1, 10))
    with pytest.raises(ParameterError):
        SweepParams(orth, F(1, 10), (1, 1), F(1, 10), F(1, 10))  # on the boundary
    with pytest.raises(ParameterError):
        SweepParams(ConvexCone(2, ((0, 1),)), F(1, 10), (0, 1), F(1, 10), F(1, 10))


def test_sweep_with_explicit_params():
    gamma = ConvexCone(2, ((-2, 1), (2, 1)))  # {v2 >= 2|v1|}, opening along xi0
    params = SweepParams(gamma, F(1, 100), (0, 1), F(1, 16), F(1, 8))
    res = sweep_support_trace(S, CotangentPoint((-1, 0), (0, 1)), params)
    assert conormal0_ball_test(S, res.point.x, res.point.xi)
    assert res.to_json()["point"]["x"]
