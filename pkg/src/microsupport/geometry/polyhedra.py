"""Exact convex polyhedra and finite unions of them."""
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from ..errors import DimensionMismatch, EmptyPolyhedronError
from .feasibility import find_point, integral_row
from .linalg import ZERO, dot, nullspace, q, qvec, rank, solve_unique, sub


def _negate(row):
    a, b = row
    return tuple(-x for x in a), -b


def covered_by_union(n, pieces, eqs=(), ges=(), gts=()):
    """Decide whether the set ``{eqs, ges, gts}`` lies in a union of polyhedra.

    ``pieces`` is a list of non-strict row lists ``[(a, b), ...]``.  The
    region is split against each piece (``R \\ Q`` as a disjoint union of
    ``R`` intersected with one violated row of ``Q``), pruning empty parts.
    """
    pieces = [[integral_row(r) for r in p] for p in pieces]
    # thick pieces first: they remove the most of the region per split
    pieces.sort(key=_equality_pairs)
    ges = [integral_row(r) for r in ges]
    gts = [integral_row(r) for r in gts]
    return _covered(n, pieces, list(eqs), ges, gts)


def _equality_pairs(rows):
    keys = {(a, b) for a, b in rows}
    return sum((tuple(-v for v in a), -b) in keys for a, b in rows)


def _covered(n, pieces, eqs, ges, gts):
    if find_point(n, eqs, ges, gts) is None:
        return True
    if not pieces:
        return False
    first, rest = pieces[0], pieces[1:]
    if find_point(n, eqs, ges + first, gts) is None:
        return _covered(n, rest, eqs, ges, gts)
    kept = []
    for row in first:
        # the part of the region violating ``row`` but satisfying the earlier rows
        if not _covered(n, rest, eqs, ges + kept, gts + [_negate(row)]):
            return False
        kept.append(row)
    return True


@dataclass(frozen=True)
class ConvexPolyhedron:
    """``{x : <a, x> >= b for every (a, b) in halfspaces}`` in ``R^dim``."""

    dim: int
    halfspaces: tuple = ()

    def __post_init__(self):
        rows = []
        for a, b in self.halfspaces:
            a = qvec(a)
            if len(a) != self.dim:
                raise DimensionMismatch(f"halfspace normal has length {len(a)}, expected {self.dim}")
            rows.append((a, q(b)))
        object.__setattr__(self, "halfspaces", tuple(rows))

    # -- constructors -----------------------------------------------------
    @classmethod
    def whole(cls, dim):
        return cls(dim, ())

    @classmethod
    def empty(cls, dim):
        return cls(dim, (((0,) * dim, 1),))

    @classmethod
    def point(cls, x):
        x = qvec(x)
        n = len(x)
        rows = []
        for i in range(n):
            e = tuple(1 if j == i else 0 for j in range(n))
            rows.append((e, x[i]))
            rows.append((tuple(-v for v in e), -x[i]))
        return cls(n, tuple(rows))

    @classmethod
    def box(cls, lo, hi):
        lo, hi = qvec(lo), qvec(hi)
        n = len(lo)
        rows = []
        for i in range(n):
            e = tuple(1 if j == i else 0 for j in range(n))
            rows.append((e, lo[i]))
            rows.append((tuple(-v for v in e), -hi[i]))
        return cls(n, tuple(rows))

    @classmethod
    def from_equalities(cls, dim, eqs, ges=()):
        rows = list(ges)
        for a, b in eqs:
            rows.append((a, b))
            rows.append(_negate((qvec(a), q(b))))
        return cls(dim, tuple(rows))

    # -- basic predicates -------------------------------------------------
    def contains(self, x):
        x = qvec(x)
        if len(x) != self.dim:
            raise DimensionMismatch(f"point has length {len(x)}, expected {self.dim}")
        return all(dot(a, x) >= b for a, b in self.halfspaces)

    def __contains__(self, x):
        return self.contains(x)

    @cached_property
    def witness(self):
        """Some rational point of the polyhedron, or ``None`` when empty."""
        return find_point(self.dim, ges=self.halfspaces)

    @cached_property
    def is_empty(self):
        return self.witness is None

    def active_rows(self, x):
        x = qvec(x)
        return [(a, b) for a, b in self.halfspaces if dot(a, x) == b]

    @cached_property
    def implicit_equalities(self):
        """Rows that hold with equality on the whole (non-empty) polyhedron."""
        if self.is_empty:
            return ()
        out = []
        for i, (a, b) in enumerate(self.halfspaces):
            others = self.halfspaces[:i] + self.halfspaces[i + 1:]
            if find_point(self.dim, ges=others, gts=[(a, b)]) is None:
                out.append((a, b))
        return tuple(out)

    @cached_property
    def dimension(self):
        """Affine dimension; ``-1`` for the empty set."""
        if self.is_empty:
            return -1
        return self.dim - rank([a for a, _ in self.implicit_equalities], self.dim)

    @cached_property
    def direction_space(self):
        """Basis of the linear space parallel to the affine hull."""
        return nullspace([a for a, _ in self.implicit_equalities], self.dim)

    @cached_property
    def relative_interior_point(self):
        if self.is_empty:
            return None
        eqs = self.implicit_equalities
        strict = [r for r in self.halfspaces if r not in eqs]
        return find_point(self.dim, eqs=eqs, gts=strict)

    @cached_property
    def is_bounded(self):
        if self.is_empty:
            return True
        rec = [(a, ZERO) for a, _ in self.halfspaces]
        for i in range(self.dim):
            for s in (1, -1):
                e = tuple(s if j == i else 0 for j in range(self.dim))
                if find_point(self.dim, ges=rec, gts=[(e, 0)]) is not None:
                    return False
        return True

    def contains_polyhedron(self, other):
        """Exact ``other ⊆ self``."""
        if other.dim != self.dim:
            raise DimensionMismatch("dimension mismatch in containment")
        return all(
            find_point(self.dim, ges=other.halfspaces, gts=[_negate(row)]) is None
            for row in self.halfspaces
        )

    def same_set(self, other):
        return self.contains_polyhedron(other) and other.contains_polyhedron(self)

    def intersect(self, other):
        if other.dim != self.dim:
            raise DimensionMismatch("dimension mismatch in intersection")
        return ConvexPolyhedron(self.dim, self.halfspaces + other.halfspaces)

    def add_rows(self, rows):
        return ConvexPolyhedron(self.dim, self.halfspaces + tuple(rows))

    def translate(self, t):
        t = qvec(t)
        return ConvexPolyhedron(self.dim, tuple((a, b + dot(a, t)) for a, b in self.halfspaces))

    def product(self, other):
        n, m = self.dim, other.dim
        rows = [(a + (0,) * m, b) for a, b in self.halfspaces]
        rows += [((0,) * n + a, b) for a, b in other.halfspaces]
        return ConvexPolyhedron(n + m, tuple(rows))

    def tangent_cone(self, x):
        """Cone of feasible directions at ``x`` (active rows only)."""
        from .cones import ConvexCone

        return ConvexCone(self.dim, tuple(a for a, _ in self.active_rows(x)))

    def vertices(self):
        """Vertices of a bounded polyhedron by brute-force basis enumeration."""
        if self.is_empty:
            return []
        if not self.is_bounded:
            raise ValueError("vertex enumeration needs a bounded polyhedron")
        rows = self.halfspaces
        if not rows:
            return []
        found = set()
        for idx in combinations(range(len(rows)), self.dim):
            A = [rows[i][0] for i in idx]
            x = solve_unique(A, [rows[i][1] for i in idx])
            if x is not None and self.contains(x):
                found.add(x)
        return sorted(found)

    def __repr__(self):
        return f"ConvexPolyhedron(dim={self.dim}, rows={len(self.halfspaces)})"


@dataclass(frozen=True)
class PolyhedralSet:
    """Finite union of closed convex polyhedra."""

    dim: int
    pieces: tuple = ()

    def __post_init__(self):
        pieces = tuple(self.pieces)
        for p in pieces:
            if p.dim != self.dim:
                raise DimensionMismatch("all pieces must share the ambient dimension")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def of(cls, *pieces):
        return cls(pieces[0].dim, tuple(pieces))

    @classmethod
    def empty(cls, dim):
        return cls(dim, ())

    @classmethod
    def whole(cls, dim):
        return cls(dim, (ConvexPolyhedron.whole(dim),))

    @cached_property
    def nonempty_pieces(self):
        return tuple(p for p in self.pieces if not p.is_empty)

    @property
    def is_empty(self):
        return not self.nonempty_pieces

    def contains(self, x):
        return any(p.contains(x) for p in self.pieces)

    def __contains__(self, x):
        return self.contains(x)

    def contains_polyhedron(self, poly):
        return covered_by_union(self.dim, [p.halfspaces for p in self.pieces], ges=poly.halfspaces)

    def contains_set(self, other):
        return all(self.contains_polyhedron(p) for p in other.pieces)

    def same_set(self, other):
        return self.contains_set(other) and other.contains_set(self)

    def tangent_cone(self, x):
        """Union of the tangent cones of the pieces through ``x``."""
        from ..errors import NotInSetError

        x = qvec(x)
        cones = [p.tangent_cone(x) for p in self.pieces if p.contains(x)]
        if not cones:
            raise NotInSetError(f"point {tuple(map(str, x))} is not in the set")
        return cones

    def product(self, other):
        return PolyhedralSet(self.dim + other.dim, tuple(a.product(b) for a in self.pieces for b in other.pieces))

    def intersect_polyhedron(self, poly):
        return PolyhedralSet(self.dim, tuple(p.intersect(poly) for p in self.pieces))

    @cached_property
    def is_bounded(self):
        return all(p.is_bounded for p in self.nonempty_pieces)

    def hyperplanes(self):
        """Distinct supporting hyperplanes of all piece rows, canonically scaled."""
        out = {}
        for p in self.pieces:
            for a, b in p.halfspaces:
                if all(v == 0 for v in a):
                    continue
                key = _canonical_hyperplane(a, b)
                out[key] = True
        return list(out)

    def __repr__(self):
        return f"PolyhedralSet(dim={self.dim}, pieces={len(self.pieces)})"


def _canonical_hyperplane(a, b):
    """Integer-primitive ``(a, b)`` with first nonzero coefficient positive."""
    from math import gcd

    a, b = qvec(a), q(b)
    den = b.denominator
    for x in a:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in a] + [int(b * den)]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    ints = [v // g for v in ints]
    lead = next(v for v in ints[:-1] if v != 0)
    if lead < 0:
        ints = [-v for v in ints]
    return tuple(ints[:-1]), ints[-1]


@dataclass(frozen=True)
class LocallyClosedPolyhedralSet:
    """``closure \\ removed`` with ``removed`` a closed subset of ``closure``."""

    closure: PolyhedralSet
    removed: PolyhedralSet = None

    def __post_init__(self):
        removed = self.removed
        if removed is None:
            removed = PolyhedralSet.empty(self.closure.dim)
            object.__setattr__(self, "removed", removed)
        if removed.dim != self.closure.dim:
            raise DimensionMismatch("closure and removed part differ in dimension")

    @property
    def dim(self):
        return self.closure.dim

    @classmethod
    def closed(cls, s):
        return cls(s, PolyhedralSet.empty(s.dim))

    def contains(self, x):
        return self.closure.contains(x) and not self.removed.contains(x)

    def __contains__(self, x):
        return self.contains(x)

    def removed_within_closure(self):
        """Exact check of the invariant ``removed ⊆ closure``."""
        return self.closure.contains_set(self.removed)

    def is_disjoint_from(self, other):
        """Exact emptiness of the intersection of two locally closed sets."""
        rem = [p.halfspaces for p in self.removed.pieces + other.removed.pieces]
        for a in self.closure.pieces:
            for b in other.closure.pieces:
                if not covered_by_union(self.dim, rem, ges=a.halfspaces + b.halfspaces):
                    return False
        return True


def dist_to_convex(x, poly):
    """Nearest point of a non-empty polyhedron and the distance to it.

    Returns ``(d, y, d_sq)`` with ``d_sq`` the exact squared distance and ``y``
    the exact (rational) projection.  The projection solves the KKT system of
    ``min |y - x|^2`` over linearly independent active sets; the first set
    whose multipliers are non-negative and whose point is feasible is optimal.
    """
    from math import sqrt

    x = qvec(x)
    if poly.is_empty:
        raise EmptyPolyhedronError("distance to an empty polyhedron")
    if poly.contains(x):
        return 0.0, x, ZERO
    rows = poly.halfspaces
    violated = [i for i, (a, b) in enumerate(rows) if dot(a, x) < b]
    order = violated + [i for i in range(len(rows)) if i not in violated]
    n = poly.dim
    for size in range(1, min(n, len(rows)) + 1):
        for idx in combinations(order, size):
            A = [rows[i][0] for i in idx]
            if rank(A, n) < size:
                continue
            # (A A^T) lam = b_I - A x ;  y = x + A^T lam
            G = [[dot(ai, aj) for aj in A] for ai in A]
            rhs = [rows[i][1] - dot(rows[i][0], x) for i in idx]
            lam = solve_unique(G, rhs)
            if lam is None or any(l < 0 for l in lam):
                continue
            y = list(x)
            for l, a in zip(lam, A):
                for k in range(n):
                    y[k] += l * a[k]
            y = tuple(y)
            if poly.contains(y):
                d_sq = dot(sub(x, y), sub(x, y))
                return sqrt(d_sq), y, d_sq
    raise AssertionError("projection enumeration failed")  # unreachable for non-empty input
