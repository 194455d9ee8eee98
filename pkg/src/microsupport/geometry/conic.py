"""Points and closed conic subsets of the cotangent bundle ``T*R^n``."""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import sqrt

from ..errors import DimensionMismatch, EstimateOnlyError
from .cones import ConvexCone
from .linalg import ZERO, dot, qvec
from .polyhedra import ConvexPolyhedron, PolyhedralSet, covered_by_union


@dataclass(frozen=True)
class CotangentPoint:
    """``(x; xi)`` with base point ``x`` and covector ``xi``."""

    x: tuple
    xi: tuple

    def __post_init__(self):
        x, xi = qvec(self.x), qvec(self.xi)
        if len(x) != len(xi):
            raise DimensionMismatch("base and fiber lengths differ")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)

    @property
    def dim(self):
        return len(self.x)

    @property
    def coords(self):
        """Concatenated ``(x_1..x_n, xi_1..xi_n)``."""
        return self.x + self.xi

    def scaled(self, lam):
        return CotangentPoint(self.x, tuple(lam * v for v in self.xi))

    def antipodal(self):
        return CotangentPoint(self.x, tuple(-v for v in self.xi))

    def __str__(self):
        xs = ", ".join(map(str, self.x))
        ks = ", ".join(map(str, self.xi))
        return f"({xs}; {ks})"


@dataclass(frozen=True)
class ConicPiece:
    base: ConvexPolyhedron
    fiber: ConvexCone

    def __post_init__(self):
        if self.base.dim != self.fiber.dim:
            raise DimensionMismatch("base and fiber dimensions differ")

    @property
    def dim(self):
        return self.base.dim

    def contains(self, p):
        return self.base.contains(p.x) and self.fiber.contains(p.xi)

    def joint_rows(self):
        """Rows of ``base x fiber`` as a polyhedron in ``R^{2n}``."""
        n = self.dim
        zeros = (ZERO,) * n
        rows = [(a + zeros, b) for a, b in self.base.halfspaces]
        rows += [(zeros + a, ZERO) for a in self.fiber.halfspaces]
        return rows

    def joint_polyhedron(self):
        return ConvexPolyhedron(2 * self.dim, tuple(self.joint_rows()))

    @cached_property
    def is_empty(self):
        return self.base.is_empty

    @cached_property
    def dimension(self):
        """Dimension of ``base x fiber``; ``-1`` when empty."""
        if self.is_empty:
            return -1
        return self.base.dimension + self.fiber.as_polyhedron().dimension


@dataclass(frozen=True)
class ConicSubset:
    """Union of closed ``base x fiber`` pieces, optionally with samples.

    A subset built only from samples is an estimate; exact queries on it raise
    :class:`EstimateOnlyError`.
    """

    dim: int
    pieces: tuple = ()
    samples: tuple = None
    exact: bool = True

    def __post_init__(self):
        pieces = tuple(p if isinstance(p, ConicPiece) else ConicPiece(*p) for p in self.pieces)
        for p in pieces:
            if p.dim != self.dim:
                raise DimensionMismatch("piece dimension differs from the subset dimension")
        object.__setattr__(self, "pieces", pieces)
        if self.samples is not None:
            samples = tuple(self.samples)
            for s in samples:
                if s.dim != self.dim:
                    raise DimensionMismatch("sample dimension differs from the subset dimension")
            object.__setattr__(self, "samples", samples)

    # -- constructors -----------------------------------------------------
    @classmethod
    def empty(cls, n):
        return cls(n, ())

    @classmethod
    def from_samples(cls, n, samples):
        return cls(n, (), tuple(samples), exact=False)

    @classmethod
    def zero_section(cls, s):
        """Zero section over a polyhedral set."""
        z = ConvexCone.zero(s.dim)
        return cls(s.dim, tuple(ConicPiece(p, z) for p in s.pieces))

    # -- predicates -------------------------------------------------------
    def _require_exact(self):
        if not self.exact:
            raise EstimateOnlyError("conic subset is known only through samples")

    @cached_property
    def nonempty_pieces(self):
        return tuple(p for p in self.pieces if not p.is_empty)

    @property
    def is_empty(self):
        self._require_exact()
        return not self.nonempty_pieces

    def contains(self, p):
        self._require_exact()
        if p.dim != self.dim:
            raise DimensionMismatch("query point dimension differs")
        return any(piece.contains(p) for piece in self.pieces)

    def __contains__(self, p):
        return self.contains(p)

    def fiber_at(self, x):
        """Fiber cones of the pieces whose base contains ``x``."""
        self._require_exact()
        return [p.fiber for p in self.pieces if p.base.contains(x)]

    def contains_subset(self, other):
        """Exact ``other ⊆ self`` by region splitting in ``R^{2n}``."""
        self._require_exact()
        other._require_exact()
        mine = [p.joint_rows() for p in self.nonempty_pieces]
        return all(covered_by_union(2 * self.dim, mine, ges=p.joint_rows()) for p in other.nonempty_pieces)

    def same_set(self, other):
        return self.contains_subset(other) and other.contains_subset(self)

    def base_projection(self):
        self._require_exact()
        return PolyhedralSet(self.dim, tuple(p.base for p in self.pieces))

    def union(self, other):
        if other.dim != self.dim:
            raise DimensionMismatch("dimension mismatch in union")
        samples = None
        if self.samples is not None or other.samples is not None:
            samples = (self.samples or ()) + (other.samples or ())
        return ConicSubset(self.dim, self.pieces + other.pieces, samples, self.exact and other.exact)

    def product(self, other):
        """Product descriptor in ``T*(R^n x R^m) = T*R^n x T*R^m``."""
        self._require_exact()
        other._require_exact()
        pieces = [
            ConicPiece(a.base.product(b.base), a.fiber.product(b.fiber))
            for a in self.pieces
            for b in other.pieces
        ]
        return ConicSubset(self.dim + other.dim, tuple(pieces))

    def with_samples(self, samples):
        return ConicSubset(self.dim, self.pieces, tuple(samples), self.exact)

    def samples_consistent(self):
        """Every stored sample passes exact membership (when exact pieces exist)."""
        if not self.exact or self.samples is None:
            return True
        return all(self.contains(s) for s in self.samples)

    def sample(self, rng, count, window=4, zero_fraction=Fraction(1, 5)):
        from .sampling import sample_conic

        return sample_conic(self, rng, count, window=window, zero_fraction=zero_fraction)

    def __repr__(self):
        kind = "exact" if self.exact else "sampled"
        ns = 0 if self.samples is None else len(self.samples)
        return f"ConicSubset(dim={self.dim}, pieces={len(self.pieces)}, samples={ns}, {kind})"


def antipodal(subset):
    """Image under ``(x; xi) -> (x; -xi)``; pieces and samples alike."""
    pieces = tuple(ConicPiece(p.base, p.fiber.negate()) for p in subset.pieces)
    samples = None if subset.samples is None else tuple(s.antipodal() for s in subset.samples)
    return ConicSubset(subset.dim, pieces, samples, subset.exact)


def conic_membership(subset, p):
    """Exact decision ``p in subset``; raises on sample-only subsets."""
    return subset.contains(p)


def unit_scaled(xi):
    """Rescale a rational covector by a rational factor so that ``|xi| ~ 1``.

    The factor is a rational approximation of ``1/|xi|`` so the direction
    (and membership in any rational cone or subspace) is preserved exactly.
    """
    xi = qvec(xi)
    nrm = sqrt(float(dot(xi, xi)))
    if nrm == 0:
        return xi
    lam = Fraction(1 / nrm).limit_denominator(10**12)
    return tuple(lam * v for v in xi)
