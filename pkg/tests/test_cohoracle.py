import xml.etree.ElementTree as ET
from fractions import Fraction

import pytest
from conftest import random_bounded_set

from microsupport import worked
from microsupport.cohoracle import (
    CohomologyRanks,
    Stencil,
    build_complex,
    conic_svg,
    germ_ranks,
    local_cohomology,
    membership_svg,
    pair_cohomology,
    polygon_window,
    probe_grid,
    ssk_definition_test,
)
from microsupport.cohoracle.ssk import run_probes, worker_count
from microsupport.errors import DimensionMismatch, NotInSetError, ParameterError, PreconditionError
from microsupport.geometry import ConvexPolyhedron, CotangentPoint, LocallyClosedPolyhedralSet, PolyhedralSet
from microsupport.geometry.arrangement import arrangement_cells
from microsupport.sheaf import example_set
from microsupport.symplectic import ScalarField

F = Fraction


def box(lo, hi):
    return ConvexPolyhedron.box(lo, hi)


def closed(*pieces):
    return PolyhedralSet.of(*pieces)


# -- relative cohomology of pairs ---------------------------------------------


def test_pair_cohomology_examples():
    sq = closed(box((0, 0), (1, 1)))
    assert pair_cohomology(sq) == {0: 1}
    assert pair_cohomology(sq, closed(box((0, 0), (F(1, 2), 1)))).is_zero
    ring = closed(box((0, 0), (3, 1)), box((0, 2), (3, 3)), box((0, 0), (1, 3)), box((2, 0), (3, 3)))
    assert pair_cohomology(ring) == {0: 1, 1: 1}
    edges = closed(box((0, 0), (1, 0)), box((0, 1), (1, 1)), box((0, 0), (0, 1)), box((1, 0), (1, 1)))
    # the square relative to its boundary circle
    assert pair_cohomology(sq, edges) == {2: 1}
    two = closed(box((0, 0), (1, 1)), box((3, 0), (4, 1)))
    assert pair_cohomology(two) == {0: 2}


def test_pair_cohomology_in_dimension_one():
    seg = closed(box((0,), (1,)))
    ends = closed(ConvexPolyhedron.point((0,)), ConvexPolyhedron.point((1,)))
    assert pair_cohomology(seg) == {0: 1}
    assert pair_cohomology(seg, ends) == {1: 1}
    assert pair_cohomology(seg, closed(ConvexPolyhedron.point((0,)))).is_zero


def test_pair_cohomology_errors():
    sq = closed(box((0, 0), (1, 1)))
    with pytest.raises(PreconditionError):
        pair_cohomology(sq, closed(box((2, 2), (3, 3))))
    with pytest.raises(PreconditionError):
        pair_cohomology(closed(ConvexPolyhedron(2, (((1, 0), 0),))))
    with pytest.raises(DimensionMismatch):
        pair_cohomology(sq, closed(box((0,), (1,))))


def test_boundary_squared_is_zero(rng):
    window = [r for r in ConvexPolyhedron.box((-3, -3), (3, 3)).halfspaces]
    for _ in range(10):
        lines = []
        for _ in range(rng.randint(1, 5)):
            a = (rng.randint(-3, 3), rng.randint(-3, 3))
            if any(a):
                lines.append((tuple(F(v) for v in a), F(rng.randint(-2, 2))))
        cx = build_complex(2, lines, window)
        assert cx.boundary_squared_zero()
        # a convex window is contractible
        assert cx.euler == 1


def test_polygon_window_contains_a_disc():
    rows = polygon_window((1, 2), 1)
    p = ConvexPolyhedron(2, tuple(rows))
    assert p.is_bounded and len(rows) == 16
    for v in [(F(1), F(2)), (F(1, 2) + 1, F(2)), (F(1), F(2) - F(1, 2))]:
        assert p.contains(v)
    assert not p.contains((F(2) + F(1, 10), F(2)))


# -- local cohomology ---------------------------------------------------------


def test_local_cohomology_half_line():
    half = closed(ConvexPolyhedron(1, (((1,), 0),)))
    assert local_cohomology(half, (0,), (1,)) == {0: 1}
    assert local_cohomology(half, (0,), (-1,)).is_zero
    assert local_cohomology(half, (0,), (0,)) == {0: 1}
    assert local_cohomology(half, (5,), (1,)).is_zero


def test_local_cohomology_open_half_line():
    # k on (0, inf): the outward covector sees degree 1, the inward one nothing
    s = worked.remark_set()
    assert local_cohomology(s, (0,), (-1,)) == {1: 1}
    assert local_cohomology(s, (0,), (1,)).is_zero
    assert local_cohomology(s, (0,), (0,)).is_zero
    assert local_cohomology(s, (1,), (0,)) == {0: 1}


def test_local_cohomology_point_and_plane():
    pt = closed(ConvexPolyhedron.point((0, 0)))
    plane = PolyhedralSet.whole(2)
    for xi in [(1, 0), (1, 1), (-2, 1)]:
        assert local_cohomology(pt, (0, 0), xi) == {0: 1}
        assert local_cohomology(plane, (0, 0), xi).is_zero
    assert local_cohomology(plane, (0, 0), (0, 0)) == {0: 1}


def test_local_cohomology_example_table():
    s = example_set()
    for name, x, xi, expected in worked.example_local_types():
        assert local_cohomology(s, x, xi) == expected, name


def test_local_cohomology_accepts_affine_fields():
    s = example_set()
    assert local_cohomology(s, (0, 0), ScalarField.parse("-x1 - x2")) == local_cohomology(s, (0, 0), (-1, -1))
    with pytest.raises(ParameterError):
        local_cohomology(s, (0, 0), ScalarField.parse("x1**2"))
    with pytest.raises(ParameterError):
        local_cohomology(s, (0, 0), ScalarField.parse("x1 + 1"))
    with pytest.raises(ParameterError):
        local_cohomology(s, (0, 0), ScalarField.parse("xi1"))


def test_local_cohomology_errors():
    s = example_set()
    with pytest.raises(NotInSetError):
        local_cohomology(s, (-1, -1), (1, 0))
    with pytest.raises(DimensionMismatch):
        local_cohomology(s, (0,), (1,))
    with pytest.raises(PreconditionError):
        local_cohomology(closed(box((0, 0, 0), (1, 1, 1))), (0, 0, 0), (1, 0, 0))
    with pytest.raises(ParameterError):
        local_cohomology(s, (0, 0), (1, 0), eps=F(1, 8), eps2=F(1, 4))


def test_local_cohomology_radius_independent():
    s = example_set()
    for eps in [F(1, 2), F(1, 10), F(1, 1000)]:
        assert local_cohomology(s, (0, 0), (1, 1), eps=eps) == {1: 1}


def test_germ_cache_matches_direct_computation(rng):
    dirs = [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 2), (2, -3), (0, 0)]
    for _ in range(8):
        s = random_bounded_set(rng)
        for cell in arrangement_cells(s):
            x = cell.witness
            for xi in dirs:
                assert germ_ranks(s, x, xi) == local_cohomology(s, x, xi), (s, x, xi)


def test_cohomology_ranks_container():
    r = CohomologyRanks({0: 1, 1: 0, 2: 3})
    assert r.ranks == {0: 1, 2: 3} and r[1] == 0 and r.euler == 4
    assert r.nonzero_at_or_below(0) and not CohomologyRanks({1: 1}).nonzero_at_or_below(0)
    assert r.to_json() == {"0": 1, "2": 3}
    with pytest.raises(ValueError):
        CohomologyRanks({0: -1})


# -- probes -------------------------------------------------------------------


def test_probe_grid_sizes():
    assert len(probe_grid(-1, 1, 4)) == 16 * 17
    assert len(probe_grid(-1, 1, 4, include_zero=False)) == 16 * 16
    one = probe_grid(-2, 2, 5, covectors=[(1,), (-1,)])
    assert len(one) == 15 and one[0].x == (F(-2),)
    xs = sorted({p.x for p in probe_grid(0, 1, 2, covectors=[(1, 0)])})
    assert xs == [(0, 0), (0, F(1, 2)), (F(1, 2), 0), (F(1, 2), F(1, 2))]


def test_membership_is_monotone_in_k():
    s = example_set()
    probes = probe_grid(-1, 1, 4)
    low = ssk_definition_test(s, 0, probes)
    high = ssk_definition_test(s, 1, probes)
    for a, b in zip(low, high):
        assert not a["member"] or b["member"]
    assert sum(b["member"] for b in high) > sum(a["member"] for a in low)


def test_example_k1_adds_the_corner_quadrant():
    s = example_set()
    ss1 = worked.example_conormal().union(worked.example_quadrant())
    probes = probe_grid(0, 1, 1)
    assert all(p.x == (0, 0) for p in probes)
    for r in ssk_definition_test(s, 1, probes):
        assert r["member"] == ss1.contains(CotangentPoint(r["x"], r["xi"])), r
    corner = ssk_definition_test(s, 0, [((0, 0), (1, 1))])[0]
    assert not corner["member"]
    assert ssk_definition_test(s, 1, [((0, 0), (1, 1))])[0]["witness"] is not None


def test_definition_test_outside_closure_and_errors():
    s = example_set()
    r = ssk_definition_test(s, 5, [((-1, -1), (0, 0))])[0]
    assert r["label"] == "out" and r["ranks"] is None
    with pytest.raises(DimensionMismatch):
        ssk_definition_test(s, 0, [((0,), (1,))])
    with pytest.raises(PreconditionError):
        ssk_definition_test(closed(box((0, 0, 0), (1, 1, 1))), 0, [])
    with pytest.raises(ValueError):
        Stencil(base_fraction=0)


def test_parallel_probes_match_serial(monkeypatch):
    s = example_set()
    probes = probe_grid(-1, 1, 3)
    serial = ssk_definition_test(s, 1, probes)
    assert run_probes(s, 1, probes, workers=2) == serial
    monkeypatch.setenv("MICROSUPPORT_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("MICROSUPPORT_THREADS", "many")
    assert worker_count() == 1


# -- plots --------------------------------------------------------------------


def test_svg_outputs_parse():
    s = example_set()
    records = ssk_definition_test(s, 0, probe_grid(-1, 1, 4, covectors=[(0, 1)]))
    root = ET.fromstring(membership_svg(records, (0, 1)))
    assert root.tag.endswith("svg")
    assert len([e for e in root.iter() if e.tag.endswith("rect")]) == 16
    root = ET.fromstring(conic_svg(worked.example_conormal(), at=[(0, 0), (-1, 0)]))
    assert root.tag.endswith("svg")
    with pytest.raises(ValueError):
        conic_svg(worked.remark_ss0())


def test_locally_closed_input_types():
    s = LocallyClosedPolyhedralSet.closed(example_set())
    assert local_cohomology(s, (0, 0), (-1, -1)) == local_cohomology(example_set(), (0, 0), (-1, -1))
    assert local_cohomology(box((0, 0), (1, 1)), (0, 0), (1, 1)) == {0: 1}
