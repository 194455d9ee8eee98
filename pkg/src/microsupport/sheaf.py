"""Truncated microsupports from stratification data.

A sheaf is described by strata ``Y_a`` with closed conormal pieces
``closure(Lambda_a)`` and the set of degrees in which the microlocal type
``K_a`` has cohomology.  ``SS_k`` is then the union of the pieces whose
lowest degree is at most ``k``.  The module also carries the perversity
formula and criterion, pruning of low-dimensional sets from a conic
subset, and the canonical stratification of a constant sheaf ``k_S``.
"""
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DimensionMismatch, ParameterError, PreconditionError
from .geometry import ConicPiece, ConicSubset, ConvexCone, ConvexPolyhedron, LocallyClosedPolyhedralSet, PolyhedralSet
from .geometry.arrangement import arrangement_cells
from .geometry.feasibility import find_point
from .geometry.linalg import ZERO, nullspace, rank
from .geometry.polyhedra import _negate, covered_by_union
from .normalcone import conormal0


# ---------------------------------------------------------------------------
# descriptions


def direction_space(stratum):
    """Span of the direction spaces of the closure pieces of a stratum."""
    n = stratum.dim
    vecs = []
    for piece in stratum.closure.nonempty_pieces:
        vecs.extend(piece.direction_space)
    basis = []
    for v in vecs:
        if rank(basis + [v], n) > len(basis):
            basis.append(v)
    return basis


def annihilator(stratum):
    """Basis of the covectors vanishing on the stratum's direction space."""
    basis = direction_space(stratum)
    return nullspace(basis, stratum.dim) if basis else [
        tuple(Fraction(int(i == j)) for j in range(stratum.dim)) for i in range(stratum.dim)
    ]


def conormal_bundle(stratum):
    """``closure(T*_Y X)``: each closure piece times the annihilator."""
    n = stratum.dim
    ann = ConvexCone.subspace(annihilator(stratum), n)
    return ConicSubset(n, tuple(ConicPiece(p, ann) for p in stratum.closure.nonempty_pieces))


@dataclass(frozen=True)
class StratumDatum:
    """One stratum ``Y``, the closed conormal piece over it and the degrees of ``K``.

    ``lam`` holds ``closure(Lambda)`` as exact closed pieces; its bases lie
    in ``closure(Y)`` and its fibers annihilate the tangent space of ``Y``.
    """

    id: str
    stratum: LocallyClosedPolyhedralSet
    lam: ConicSubset
    degrees: frozenset
    rank_by_degree: dict = None

    def __post_init__(self):
        if isinstance(self.stratum, PolyhedralSet):
            object.__setattr__(self, "stratum", LocallyClosedPolyhedralSet.closed(self.stratum))
        degrees = frozenset(int(d) for d in self.degrees)
        if not degrees:
            raise ParameterError(f"stratum {self.id}: degree set is empty", code="empty-degrees")
        object.__setattr__(self, "degrees", degrees)
        if self.rank_by_degree is not None:
            ranks = {int(k): int(v) for k, v in dict(self.rank_by_degree).items()}
            if set(ranks) != degrees or any(v <= 0 for v in ranks.values()):
                raise ParameterError(f"stratum {self.id}: ranks must be positive on exactly the degrees")
            object.__setattr__(self, "rank_by_degree", ranks)
        if self.lam.dim != self.stratum.dim:
            raise DimensionMismatch(f"stratum {self.id}: conormal piece has the wrong dimension")
        self._check_conormal()

    def _check_conormal(self):
        n = self.stratum.dim
        closure = self.stratum.closure
        ann = ConvexCone.subspace(annihilator(self.stratum), n)
        for piece in self.lam.nonempty_pieces:
            if not closure.contains_polyhedron(piece.base):
                raise PreconditionError(f"stratum {self.id}: conormal base leaves the stratum", code="not-conormal")
            if not ann.contains_cone(piece.fiber):
                raise PreconditionError(
                    f"stratum {self.id}: fiber does not annihilate the stratum", code="not-conormal"
                )

    @property
    def min_degree(self):
        return min(self.degrees)


def _same_base(a, b):
    if a == b:
        return True
    return a.closure.same_set(b.closure) and a.removed.same_set(b.removed)


@dataclass(frozen=True)
class StratifiedSheafDescription:
    """Strata data for a constructible sheaf on ``R^n``.

    Bases are pairwise disjoint or equal; equal bases carry disjoint
    conormal parts (one datum per degree pattern).
    """

    n: int
    strata: tuple
    covers_ss: bool = True
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        strata = tuple(self.strata)
        object.__setattr__(self, "strata", strata)
        ids = [s.id for s in strata]
        if len(set(ids)) != len(ids):
            raise ParameterError("stratum ids must be unique", code="duplicate-id")
        for s in strata:
            if s.stratum.dim != self.n:
                raise DimensionMismatch(f"stratum {s.id} lives in the wrong dimension")
        if self.check:
            for i, a in enumerate(strata):
                for b in strata[i + 1:]:
                    if _same_base(a.stratum, b.stratum):
                        continue
                    if not a.stratum.is_disjoint_from(b.stratum):
                        raise PreconditionError(f"strata {a.id} and {b.id} overlap", code="overlapping-strata")

    def by_id(self):
        return {s.id: s for s in self.strata}

    def closure_union(self):
        out = ConicSubset.empty(self.n)
        for s in self.strata:
            out = out.union(s.lam)
        return out

    @property
    def max_degree(self):
        return max((max(s.degrees) for s in self.strata), default=0)

    @property
    def min_degree(self):
        return min((s.min_degree for s in self.strata), default=0)


def ssk_from_strata(d, k):
    """``SS_k``: union of ``closure(Lambda_a)`` over strata with ``min(degrees) <= k``."""
    out = ConicSubset.empty(d.n)
    for s in d.strata:
        if s.min_degree <= k:
            out = out.union(s.lam)
    return out


def ss0_constant(s):
    """``SS_0(k_S)`` of a closed set, which is its 0-conormal cone."""
    return conormal0(s)


# ---------------------------------------------------------------------------
# perversity


def perverse_ssk(codims, conormals, k, n=None):
    """Union of the conormal closures of strata of codimension at most ``k``."""
    missing = [i for i in conormals if i not in codims]
    if missing:
        raise ParameterError(f"no codimension for strata {sorted(missing)}", code="missing-codim")
    if n is None:
        if not conormals:
            raise ParameterError("ambient dimension unknown without strata")
        n = next(iter(conormals.values())).dim
    out = ConicSubset.empty(n)
    if k < 0:
        return out
    for i in sorted(conormals):
        c = codims[i]
        if c < 0:
            raise ParameterError(f"codimension of {i} is negative")
        if c <= k:
            out = out.union(conormals[i])
    return out


def perversity_check(d_f, d_dual, codims, detail=False):
    """Exact check of ``SS_k(F) ∪ SS_k(D F) ⊆ perverse_ssk(k)`` for every relevant ``k``."""
    if d_f.n != d_dual.n:
        raise PreconditionError("descriptions live in different dimensions", code="stratum-mismatch")
    fa, fb = d_f.by_id(), d_dual.by_id()
    if set(fa) != set(fb) or any(not _same_base(fa[i].stratum, fb[i].stratum) for i in fa):
        raise PreconditionError("the two descriptions do not share strata", code="stratum-mismatch")
    conormals = {i: conormal_bundle(s.stratum) for i, s in fa.items()}
    lo = min(d_f.min_degree, d_dual.min_degree, 0) - 1
    hi = max(d_f.max_degree, d_dual.max_degree, max(codims.values(), default=0)) + 1
    rows = []
    ok = True
    for k in range(lo, hi + 1):
        target = perverse_ssk(codims, conormals, k, d_f.n)
        lhs = ssk_from_strata(d_f, k).union(ssk_from_strata(d_dual, k))
        good = target.contains_subset(lhs)
        rows.append({"k": k, "contained": good})
        ok = ok and good
    return (ok, rows) if detail else ok


# ---------------------------------------------------------------------------
# pruning low-dimensional sets


def _dimension(n, rows):
    return ConvexPolyhedron(n, tuple(rows)).dimension


def closure_of_difference(a, s):
    """``closure(A \\ S)`` as a list of closed polyhedra in ``R^{2n}``.

    Each piece ``P`` of ``A`` minus a convex piece ``Q`` of ``S`` splits into
    the parts ``P & {r_1 >= 0, .., r_{i-1} >= 0, r_i < 0}`` over the rows of
    ``Q``.  A part is convex, so when it is non-empty its closure is the
    same polyhedron with ``r_i <= 0``.
    """
    n2 = 2 * a.dim
    subtract = [q.joint_rows() for q in s.nonempty_pieces]
    out = []
    for p in a.nonempty_pieces:
        parts = [list(p.joint_rows())]
        for qrows in subtract:
            nxt = []
            for closed in parts:
                kept = []
                for row in qrows:
                    neg = _negate(row)
                    if find_point(n2, ges=closed + kept, gts=[neg]) is not None:
                        nxt.append(closed + kept + [neg])
                    kept.append(row)
            parts = nxt
        out.extend(parts)
    return out


def _pieces_meeting(a, s):
    n2 = 2 * a.dim
    for p in a.nonempty_pieces:
        for q in s.nonempty_pieces:
            rows = p.joint_rows() + q.joint_rows()
            if find_point(n2, ges=rows) is not None:
                yield p, q, rows


def prune_invariance(a, s):
    """``closure(A \\ S) == A`` for ``S`` of dimension below ``n``.

    Raises :class:`PreconditionError` when a piece of ``S`` is not
    low-dimensional, or when ``S`` fills part of a piece of ``A`` (then the
    closure genuinely shrinks and the invariance statement does not apply).
    """
    if a.dim != s.dim:
        raise DimensionMismatch("A and S live in different cotangent bundles")
    n = a.dim
    for q in s.nonempty_pieces:
        if q.dimension >= n:
            raise PreconditionError(f"S has a piece of dimension {q.dimension} >= {n}", code="not-low-dimensional")
    for p, _, rows in _pieces_meeting(a, s):
        if _dimension(2 * n, rows) >= p.dimension:
            break
    else:
        return True
    closed = closure_of_difference(a, s)
    if all(covered_by_union(2 * n, closed, ges=p.joint_rows()) for p in a.nonempty_pieces):
        return True
    raise PreconditionError("S is not lower-dimensional relative to A", code="not-lower-dimensional")


def setminus_spot_check(a, s):
    """Exact ``A ∩ S ⊆ closure(A \\ S)``."""
    if a.dim != s.dim:
        raise DimensionMismatch("A and S live in different cotangent bundles")
    closed = closure_of_difference(a, s)
    n2 = 2 * a.dim
    return all(covered_by_union(n2, closed, ges=rows) for _, _, rows in _pieces_meeting(a, s))


# ---------------------------------------------------------------------------
# fixtures and the canonical stratification of k_S


def _poly(n, rows):
    return ConvexPolyhedron(n, tuple(rows))


def example_set():
    """``{x >= 0} ∪ {y >= 0}`` in the plane."""
    return PolyhedralSet.of(_poly(2, [((1, 0), 0)]), _poly(2, [((0, 1), 0)]))


def example_description():
    """Four strata for ``k_S``, ``S = {x >= 0 or y >= 0}``.

    The open part has type ``k_X``, the two boundary rays are clean
    boundaries (degree 0) and the corner carries a shifted skyscraper type
    (degree 1) on the open quadrant of covectors.
    """
    s = example_set()
    ray_w = _poly(2, [((0, 1), 0), ((0, -1), 0), ((-1, 0), 0)])  # y = 0, x <= 0
    ray_s = _poly(2, [((1, 0), 0), ((-1, 0), 0), ((0, -1), 0)])  # x = 0, y <= 0
    origin = ConvexPolyhedron.point((0, 0))
    strata = [
        StratumDatum(
            "open",
            LocallyClosedPolyhedralSet(s, PolyhedralSet.of(ray_w, ray_s)),
            ConicSubset.zero_section(s),
            {0},
            {0: 1},
        ),
        StratumDatum(
            "ray-y0",
            LocallyClosedPolyhedralSet(PolyhedralSet.of(ray_w), PolyhedralSet.of(origin)),
            ConicSubset(2, (ConicPiece(ray_w, ConvexCone(2, ((1, 0), (-1, 0), (0, 1)))),)),
            {0},
            {0: 1},
        ),
        StratumDatum(
            "ray-x0",
            LocallyClosedPolyhedralSet(PolyhedralSet.of(ray_s), PolyhedralSet.of(origin)),
            ConicSubset(2, (ConicPiece(ray_s, ConvexCone(2, ((0, 1), (0, -1), (1, 0)))),)),
            {0},
            {0: 1},
        ),
        StratumDatum(
            "origin",
            LocallyClosedPolyhedralSet(PolyhedralSet.of(origin)),
            ConicSubset(2, (ConicPiece(origin, ConvexCone.orthant(2)),)),
            {1},
            {1: 1},
        ),
    ]
    return StratifiedSheafDescription(2, tuple(strata))


def constant_description(n):
    """``k_X`` on ``R^n``: one stratum, degree 0, zero section."""
    whole = PolyhedralSet.whole(n)
    datum = StratumDatum("X", LocallyClosedPolyhedralSet.closed(whole), ConicSubset.zero_section(whole), {0}, {0: 1})
    return StratifiedSheafDescription(n, (datum,))


def hyperplane_description(n=2, degree=0):
    """``k_Y[-degree]`` for the hyperplane ``Y = {x_n = 0}``; one stratum of codimension 1."""
    e = tuple(int(i == n - 1) for i in range(n))
    y = _poly(n, [(e, 0), (tuple(-v for v in e), 0)])
    base = LocallyClosedPolyhedralSet.closed(PolyhedralSet.of(y))
    datum = StratumDatum("Y", base, conormal_bundle(base), {degree}, {degree: 1})
    return StratifiedSheafDescription(n, (datum,))


def _cell_stratum(cell):
    closure = cell.closure
    eqs = closure.implicit_equalities
    boundary = []
    for row in closure.halfspaces:
        if row in eqs:
            continue
        a, b = row
        face = closure.add_rows([(tuple(-v for v in a), -b)])
        if not face.is_empty:
            boundary.append(face)
    return LocallyClosedPolyhedralSet(PolyhedralSet.of(closure), PolyhedralSet(cell.dim, tuple(boundary)))


def _angle_key(v):
    from math import atan2

    return atan2(float(v[1]), float(v[0]))


def _chambers(s, cell, ann):
    """``(representative, closed cone)`` for each chamber of ``T*_Y`` at a cell.

    The fan is cut by the walls on which the germ's ranks may jump, so the
    ranks are constant on every relatively open chamber.
    """
    from .cohoracle.local import _primitive_int, germ_key, walls

    n = cell.dim
    zero = (ZERO,) * n
    out = [(zero, ConvexCone.zero(n))]
    if not ann:
        return out
    if n == 1 or len(ann) == 1:
        a = _primitive_int(ann[0])
        for v in (a, tuple(-x for x in a)):
            out.append((tuple(Fraction(x) for x in v), ConvexCone.generated_by([v], n)))
        return out
    key = germ_key(s, cell.witness)
    lines = {_primitive_int((-d[1], d[0])) for d in walls(key)} if key else set()
    lines |= {(1, 0), (0, 1)} if len(lines) < 2 else set()
    rays = sorted({r for d in lines for r in (d, tuple(-x for x in d))}, key=_angle_key)
    for i, r in enumerate(rays):
        out.append((tuple(Fraction(x) for x in r), ConvexCone.generated_by([r], n)))
        r2 = rays[(i + 1) % len(rays)]
        rep = tuple(Fraction(u + v) for u, v in zip(r, r2))
        out.append((rep, ConvexCone.generated_by([r, r2], n)))
    return out


def constant_sheaf_stratification(s):
    """Strata data for ``k_S`` from the arrangement of ``S`` (dimension 1 or 2).

    Strata are the arrangement cells inside ``closure(S)``; over each cell
    the chambers of the conormal fiber are grouped by the degrees of the
    local cohomology ``H_{phi >= 0}(k_S)``.
    """
    from .cohoracle.local import as_locally_closed, germ_ranks

    s = as_locally_closed(s)
    n = s.dim
    if n > 2:
        raise PreconditionError("canonical stratifications are computed in dimension <= 2")
    extra = s.removed.hyperplanes() if s.removed.pieces else ()
    strata = []
    for ci, cell in enumerate(arrangement_cells(s.closure, extra)):
        base = _cell_stratum(cell)
        ann = annihilator(base)
        groups = {}
        for rep, cone in _chambers(s, cell, ann):
            ranks = germ_ranks(s, cell.witness, rep)
            if ranks.is_zero:
                continue
            key = tuple(ranks.degrees())
            groups.setdefault(key, ([], ranks))[0].append(cone)
        for degs, (cones, ranks) in sorted(groups.items()):
            lam = ConicSubset(n, tuple(ConicPiece(cell.closure, c) for c in cones))
            tag = "-".join(str(d) for d in degs)
            strata.append(StratumDatum(f"cell{ci}-deg{tag}", base, lam, set(degs), dict(ranks.ranks)))
    return StratifiedSheafDescription(n, tuple(strata), check=False)
