"""Random rational sampling of polyhedra and conic subsets.

Samples are exact rational points, so they can be fed back into exact
membership tests.  Sampled cones are under-approximations by construction.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import sqrt

from ..errors import NotInSetError
from .conic import CotangentPoint, unit_scaled
from .linalg import ZERO, dot, qvec, sub
from .polyhedra import ConvexPolyhedron


@lru_cache(maxsize=4096)
def _clipped_vertices(poly, center, radius):
    lo = tuple(c - radius for c in center)
    hi = tuple(c + radius for c in center)
    clipped = poly.intersect(ConvexPolyhedron.box(lo, hi))
    if clipped.is_empty:
        return ()
    return tuple(clipped.vertices())


def _combination(rng, verts):
    k = rng.randint(1, len(verts))
    chosen = rng.sample(verts, k)
    weights = [Fraction(rng.randint(1, 16)) for _ in chosen]
    total = sum(weights)
    n = len(verts[0])
    point = [ZERO] * n
    for w, v in zip(weights, chosen):
        for i in range(n):
            point[i] += w * v[i]
    return tuple(x / total for x in point)


def sample_polyhedron(poly, rng, count, center=None, radius=4):
    """``count`` rational points of ``poly`` inside the box ``center ± radius``.

    Points are random convex combinations of random subsets of the vertices
    of the clipped polytope, so faces of every dimension are hit.  Returns an
    empty list when the clipped polytope is empty.
    """
    center = qvec(center) if center is not None else (ZERO,) * poly.dim
    verts = list(_clipped_vertices(poly, center, Fraction(radius)))
    if not verts:
        return []
    return [_combination(rng, verts) for _ in range(count)]


def sample_cone(cone, rng, count):
    """Rational vectors of ``cone`` rescaled to (approximately) unit length."""
    out = []
    verts = list(_clipped_vertices(cone.as_polyhedron(), (ZERO,) * cone.dim, Fraction(1)))
    for _ in range(count):
        v = _combination(rng, verts)
        out.append(unit_scaled(v))
    return out


def sample_conic(subset, rng, count, window=4, zero_fraction=Fraction(1, 5)):
    """Sample ``count`` points ``(x; xi)`` of an exact conic subset."""
    usable = []
    for piece in subset.nonempty_pieces:
        if _clipped_vertices(piece.base, (ZERO,) * subset.dim, Fraction(window)):
            usable.append(piece)
    if not usable:
        return []
    out = []
    for _ in range(count):
        piece = rng.choice(usable)
        x = sample_polyhedron(piece.base, rng, 1, radius=window)[0]
        if rng.random() < zero_fraction:
            xi = (ZERO,) * subset.dim
        else:
            xi = sample_cone(piece.fiber, rng, 1)[0]
        out.append(CotangentPoint(x, xi))
    return out


@dataclass(frozen=True)
class SampledCone:
    """Directions collected from normalized differences of sample pairs.

    ``vectors`` are the exact rational differences ``x_n - y_n``; the set of
    their positive multiples is contained in the true normal cone, so this is
    an under-approximation (up to closure).
    """

    dim: int
    vectors: tuple
    under_approximation: bool = True

    @property
    def directions(self):
        out = []
        for v in self.vectors:
            nrm = sqrt(float(dot(v, v)))
            out.append(tuple(float(x) / nrm for x in v))
        return out

    def all_satisfy(self, predicate):
        return all(predicate(v) for v in self.vectors)

    def near(self, direction, cos_tol=0.999):
        """Whether some sampled direction is within the angular tolerance."""
        d = [float(x) for x in direction]
        nd = sqrt(sum(x * x for x in d))
        if nd == 0:
            return True
        d = [x / nd for x in d]
        return any(sum(a * b for a, b in zip(u, d)) >= cos_tol for u in self.directions)


def normal_cone_pair_sampled(s1, s2, p, budget, rng, radius=Fraction(1, 8), scales=4):
    """Monte-Carlo estimate of ``C_p(S1, S2)``.

    Pairs ``x_n in S1``, ``y_n in S2`` are drawn from boxes of shrinking radius
    around ``p`` and the non-zero differences ``x_n - y_n`` are recorded.
    """
    p = qvec(p)
    if not (s1.contains(p) and s2.contains(p)):
        raise NotInSetError("p must lie in both (closed) sets")
    per_scale = max(1, budget // scales)
    vectors = []
    seen = set()
    r = Fraction(radius)
    for _ in range(scales):
        for _ in range(per_scale):
            xs = _draw(s1, rng, p, r)
            ys = _draw(s2, rng, p, r)
            if xs is None or ys is None:
                continue
            v = sub(xs, ys)
            if any(v) and v not in seen:
                seen.add(v)
                vectors.append(v)
        r /= 4
    return SampledCone(len(p), tuple(vectors))


def _draw(s, rng, p, r):
    pieces = [q for q in s.pieces if q.contains(p)]
    if not pieces:
        return None
    piece = rng.choice(pieces)
    pts = sample_polyhedron(piece, rng, 1, center=p, radius=r)
    return pts[0] if pts else None
