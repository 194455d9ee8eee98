from fractions import Fraction

import pytest
from conftest import random_set

from microsupport import worked
from microsupport.cohoracle import probe_grid, ssk_definition_test
from microsupport.errors import DimensionMismatch, ParameterError, PreconditionError
from microsupport.geometry import (
    ConicPiece,
    ConicSubset,
    ConvexCone,
    ConvexPolyhedron,
    CotangentPoint,
    LocallyClosedPolyhedralSet,
    PolyhedralSet,
)
from microsupport.normalcone import conormal0
from microsupport.sheaf import (
    StratifiedSheafDescription,
    StratumDatum,
    constant_description,
    constant_sheaf_stratification,
    conormal_bundle,
    example_description,
    example_set,
    hyperplane_description,
    perverse_ssk,
    perversity_check,
    prune_invariance,
    setminus_spot_check,
    ss0_constant,
    ssk_from_strata,
)

F = Fraction
ORIGIN = ConvexPolyhedron.point((0, 0))
AXIS = ConvexPolyhedron(2, (((1, 0), 0), ((-1, 0), 0)))  # x1 = 0


def ss1_example():
    return worked.example_conormal().union(worked.example_quadrant())


def point_fiber(fiber):
    return ConicSubset(2, (ConicPiece(ORIGIN, fiber),))


# -- SS_k from strata ---------------------------------------------------------


def test_ssk_from_example_description():
    d = example_description()
    assert ssk_from_strata(d, -1).is_empty
    assert ssk_from_strata(d, 0).same_set(worked.example_conormal())
    assert ssk_from_strata(d, 1).same_set(ss1_example())
    assert ssk_from_strata(d, 7).same_set(ss1_example())
    assert (d.min_degree, d.max_degree) == (0, 1)


def test_ssk_is_monotone_and_stabilizes():
    d = example_description()
    prev = ssk_from_strata(d, -2)
    for k in range(-1, 4):
        cur = ssk_from_strata(d, k)
        assert cur.contains_subset(prev)
        prev = cur
    assert ssk_from_strata(d, d.max_degree).same_set(d.closure_union())


def test_constant_sheaf_examples():
    d = constant_description(2)
    assert ssk_from_strata(d, 0).same_set(ConicSubset.zero_section(PolyhedralSet.whole(2)))
    assert ssk_from_strata(d, -1).is_empty
    assert ss0_constant(example_set()).same_set(worked.example_conormal())


def test_conormal_bundle_of_hyperplane():
    d = hyperplane_description(2)
    lam = d.strata[0].lam
    assert lam.same_set(conormal_bundle(d.strata[0].stratum))
    assert lam.contains(CotangentPoint((5, 0), (0, -3)))
    assert not lam.contains(CotangentPoint((5, 0), (1, 0)))
    assert not lam.contains(CotangentPoint((5, 1), (0, 1)))


# -- perversity ---------------------------------------------------------------


def test_perverse_ssk_examples():
    zero = ConicSubset.zero_section(PolyhedralSet.whole(2))
    line = worked.line_conormal()
    conormals = {"X": zero, "Y": line}
    codims = {"X": 0, "Y": 1}
    assert perverse_ssk(codims, conormals, -1).is_empty
    assert perverse_ssk(codims, conormals, 0).same_set(zero)
    assert perverse_ssk(codims, conormals, 1).same_set(zero.union(line))
    with pytest.raises(ParameterError):
        perverse_ssk({"X": 0}, conormals, 0)
    with pytest.raises(ParameterError):
        perverse_ssk({}, {}, 0)
    assert perverse_ssk({}, {}, 0, n=2).is_empty


@pytest.mark.parametrize("name, f, dual, codims, expected", worked.perversity_instances(), ids=lambda v: str(v)[:24])
def test_perversity_instances(name, f, dual, codims, expected):
    ok, rows = perversity_check(f, dual, codims, detail=True)
    assert ok is expected, rows
    assert all("k" in r and "contained" in r for r in rows)


def test_perversity_by_hand():
    # k_Y[-1] on a line Y in the plane: SS_1 is the conormal, allowed at codim 1
    h1 = hyperplane_description(2, 1)
    assert perversity_check(h1, h1, {"Y": 1})
    # in degree 0 the conormal already shows up at k = 0, where only codim 0 is allowed
    h0 = hyperplane_description(2, 0)
    assert not perversity_check(h0, h0, {"Y": 1})


def test_perversity_stratum_mismatch():
    with pytest.raises(PreconditionError):
        perversity_check(constant_description(2), hyperplane_description(2), {"X": 0, "Y": 1})
    with pytest.raises(PreconditionError):
        perversity_check(constant_description(2), constant_description(3), {"X": 0})


# -- pruning ------------------------------------------------------------------


def line_zero():
    return ConicSubset(2, (ConicPiece(AXIS, ConvexCone.zero(2)),))


def test_prune_invariance_examples():
    zero = ConicSubset.zero_section(PolyhedralSet.whole(2))
    assert prune_invariance(zero, line_zero())
    fan = point_fiber(ConvexCone.whole(2))
    ray = point_fiber(ConvexCone(2, ((1, 0), (-1, 0), (0, 1))))
    assert prune_invariance(fan, ray)
    # disjoint sets are unaffected
    far = ConicSubset(2, (ConicPiece(ConvexPolyhedron.point((5, 5)), ConvexCone.zero(2)),))
    assert prune_invariance(worked.example_conormal(), far)


def test_prune_invariance_errors():
    with pytest.raises(PreconditionError) as err:
        prune_invariance(worked.example_conormal(), worked.example_quadrant())
    assert err.value.code == "not-low-dimensional"
    dot = point_fiber(ConvexCone.zero(2))
    with pytest.raises(PreconditionError) as err:
        prune_invariance(dot, dot)
    assert err.value.code == "not-lower-dimensional"
    with pytest.raises(DimensionMismatch):
        prune_invariance(dot, worked.remark_ss0())


def test_setminus_spot_check():
    zero = ConicSubset.zero_section(PolyhedralSet.whole(2))
    assert setminus_spot_check(zero, line_zero())
    dot = point_fiber(ConvexCone.zero(2))
    assert not setminus_spot_check(dot, dot)
    assert setminus_spot_check(worked.example_conormal(), worked.example_quadrant())


# -- data invariants ----------------------------------------------------------


def axis_stratum():
    return LocallyClosedPolyhedralSet.closed(PolyhedralSet.of(AXIS))


def test_stratum_datum_invariants():
    base = axis_stratum()
    good = conormal_bundle(base)
    StratumDatum("a", base, good, {0}, {0: 2})
    with pytest.raises(ParameterError):
        StratumDatum("a", base, good, set())
    with pytest.raises(ParameterError):
        StratumDatum("a", base, good, {0}, {1: 1})
    with pytest.raises(DimensionMismatch):
        StratumDatum("a", base, worked.remark_ss0(), {0})
    with pytest.raises(PreconditionError):
        StratumDatum("a", base, point_fiber(ConvexCone.orthant(2)), {0})
    off = ConicSubset(2, (ConicPiece(ConvexPolyhedron.point((1, 0)), ConvexCone.generated_by([(1, 0)], 2)),))
    with pytest.raises(PreconditionError):
        StratumDatum("a", base, off, {0})


def test_description_invariants():
    base = axis_stratum()
    datum = StratumDatum("a", base, conormal_bundle(base), {0})
    with pytest.raises(ParameterError):
        StratifiedSheafDescription(2, (datum, datum))
    whole = constant_description(2).strata[0]
    with pytest.raises(PreconditionError):
        StratifiedSheafDescription(2, (whole, datum))
    # equal bases may carry separate data
    twin = StratumDatum("b", base, conormal_bundle(base), {1})
    assert len(StratifiedSheafDescription(2, (datum, twin)).strata) == 2
    with pytest.raises(DimensionMismatch):
        StratifiedSheafDescription(3, (datum,))


# -- canonical stratification of k_S ------------------------------------------


def test_canonical_stratification_of_example():
    d = constant_sheaf_stratification(example_set())
    assert ssk_from_strata(d, -1).is_empty
    assert ssk_from_strata(d, 0).same_set(worked.example_conormal())
    assert ssk_from_strata(d, 1).same_set(ss1_example())


def test_canonical_stratification_of_open_half_line():
    d = constant_sheaf_stratification(worked.remark_set())
    assert ssk_from_strata(d, 0).same_set(worked.remark_ss0())
    outward = ConicSubset(1, (ConicPiece(ConvexPolyhedron.point((0,)), ConvexCone(1, (((-1,),)))),))
    assert ssk_from_strata(d, 1).same_set(worked.remark_ss0().union(outward))


def test_canonical_ss0_is_the_conormal_cone(rng):
    for _ in range(6):
        s = random_set(rng)
        d = constant_sheaf_stratification(s)
        assert ssk_from_strata(d, 0).same_set(conormal0(s)), s


def test_strata_agree_with_the_oracle_on_a_grid():
    s = example_set()
    probes = probe_grid(-1, 1, 4)
    for k in (0, 1):
        target = ssk_from_strata(example_description(), k)
        for r in ssk_definition_test(s, k, probes):
            assert r["member"] == target.contains(CotangentPoint(r["x"], r["xi"])), (k, r)


def test_canonical_stratification_rejects_dimension_three():
    with pytest.raises(PreconditionError):
        constant_sheaf_stratification(PolyhedralSet.whole(3))
