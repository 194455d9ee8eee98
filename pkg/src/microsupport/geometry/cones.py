"""Closed convex polyhedral cones through the origin."""
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from ..errors import DimensionMismatch
from .feasibility import find_point
from .linalg import ZERO, canonical_direction, dot, nullspace, qvec, rank


def cone_rows_from_generators(gens, n):
    """H-representation of ``cone(gens)`` by facet enumeration.

    Equations of the linear span come first (as pairs of opposite rows);
    facets are the normals, inside the span, of hyperplanes through
    ``rank - 1`` independent generators with every generator on one side.
    """
    uniq = {}
    for g in gens:
        g = qvec(g)
        if len(g) != n:
            raise DimensionMismatch("generator of wrong length")
        if any(g):
            uniq.setdefault(canonical_direction(g), g)
    gens = [tuple(ZERO + v for v in d) for d in uniq]
    rows = []
    perp = nullspace(gens, n) if gens else [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    for u in perp:
        rows.append(tuple(u))
        rows.append(tuple(-v for v in u))
    if not gens:
        return _dedupe(rows)
    r = n - len(perp)
    seen = set()
    for idx in combinations(range(len(gens)), r - 1):
        sub = [gens[i] for i in idx]
        if rank(sub, n) < r - 1:
            continue
        normals = nullspace(sub + list(perp), n)
        if len(normals) != 1:
            continue
        w = normals[0]
        signs = [dot(w, g) for g in gens]
        if all(s >= 0 for s in signs):
            cand = w
        elif all(s <= 0 for s in signs):
            cand = tuple(-v for v in w)
        else:
            continue
        key = canonical_direction(cand)
        if key not in seen:
            seen.add(key)
            rows.append(cand)
    return _dedupe(rows)


def _dedupe(rows):
    out, seen = [], set()
    for r in rows:
        key = canonical_direction(r)
        if key not in seen:
            seen.add(key)
            out.append(tuple(ZERO + v for v in key))
    return tuple(out)


@dataclass(frozen=True)
class ConvexCone:
    """``{v : <a, v> >= 0 for every a in halfspaces}``."""

    dim: int
    halfspaces: tuple = ()

    def __post_init__(self):
        rows = []
        for a in self.halfspaces:
            a = qvec(a)
            if len(a) != self.dim:
                raise DimensionMismatch(f"cone normal has length {len(a)}, expected {self.dim}")
            rows.append(a)
        object.__setattr__(self, "halfspaces", tuple(rows))

    @classmethod
    def whole(cls, n):
        return cls(n, ())

    @classmethod
    def zero(cls, n):
        return cls(n, cone_rows_from_generators([], n))

    @classmethod
    def orthant(cls, n, sign=1):
        return cls(n, tuple(tuple(sign if j == i else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def generated_by(cls, gens, n):
        return cls(n, cone_rows_from_generators(gens, n))

    @classmethod
    def subspace(cls, basis, n):
        """The linear span of ``basis`` as a cone."""
        return cls.generated_by(list(basis) + [tuple(-x for x in b) for b in basis], n)

    def contains(self, v):
        v = qvec(v)
        if len(v) != self.dim:
            raise DimensionMismatch("vector of wrong length")
        return all(dot(a, v) >= 0 for a in self.halfspaces)

    def __contains__(self, v):
        return self.contains(v)

    def contains_cone(self, other):
        """Exact ``other ⊆ self``."""
        if other.dim != self.dim:
            raise DimensionMismatch("dimension mismatch")
        rows = [(a, ZERO) for a in other.halfspaces]
        return all(find_point(self.dim, ges=rows, gts=[(tuple(-x for x in a), ZERO)]) is None for a in self.halfspaces)

    def same_set(self, other):
        return self.contains_cone(other) and other.contains_cone(self)

    def is_zero(self):
        return ConvexCone.zero(self.dim).contains_cone(self)

    @cached_property
    def interior_point(self):
        """A point with every row strictly positive, or ``None``."""
        if not self.halfspaces:
            return tuple(ZERO for _ in range(self.dim))
        return find_point(self.dim, gts=[(a, ZERO) for a in self.halfspaces])

    @property
    def has_interior(self):
        return self.interior_point is not None

    def in_interior(self, v):
        v = qvec(v)
        return self.has_interior and all(dot(a, v) > 0 for a in self.halfspaces)

    def polar(self):
        return polar_cone(self)

    def negate(self):
        return ConvexCone(self.dim, tuple(tuple(-x for x in a) for a in self.halfspaces))

    def intersect(self, other):
        return ConvexCone(self.dim, self.halfspaces + other.halfspaces)

    def product(self, other):
        n, m = self.dim, other.dim
        rows = [a + (ZERO,) * m for a in self.halfspaces] + [(ZERO,) * n + a for a in other.halfspaces]
        return ConvexCone(n + m, tuple(rows))

    def as_polyhedron(self):
        from .polyhedra import ConvexPolyhedron

        return ConvexPolyhedron(self.dim, tuple((a, ZERO) for a in self.halfspaces))

    def generators(self):
        """Generators of the cone; a lineality space appears as opposite pairs.

        ``C = polar(cone(rows))``, so its generators are the facet normals of
        ``cone(rows)``.
        """
        return list(cone_rows_from_generators(self.halfspaces, self.dim))

    def __repr__(self):
        return f"ConvexCone(dim={self.dim}, rows={len(self.halfspaces)})"


def polar_cone(cone):
    """``{xi : <v, xi> >= 0 for all v in cone}`` as an H-representation."""
    if not isinstance(cone, ConvexCone):
        raise TypeError("polar_cone expects a ConvexCone")
    return ConvexCone(cone.dim, cone_rows_from_generators(cone.halfspaces, cone.dim))


def is_proper_cone(cone):
    """True iff the polar cone has non-empty interior (0 is always in the cone)."""
    return polar_cone(cone).has_interior
