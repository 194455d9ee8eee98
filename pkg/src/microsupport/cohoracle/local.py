"""Relative and local cohomology of constant sheaves on polyhedral sets.

For ``S = Sbar - R`` (``R`` closed) and an open set ``U``,
``RGamma(U; k_S)`` is the relative cohomology of ``(U & Sbar, U & R)``.
With ``Z = {phi >= 0}`` and a small polygonal window ``W`` around ``x``::

    H^j_Z(B; k_S) = H^j(K, L + K'),   K = W & Sbar,  L = K & R,
                                       K' = K & {phi <= -delta}

``K'`` models ``B - Z``; ``delta`` is below every non-zero value of
``|phi|`` at a vertex, so no critical value of ``phi`` is skipped.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from ..errors import DimensionMismatch, NotInSetError, ParameterError, PreconditionError, UnstableError
from ..geometry import ConvexPolyhedron, LocallyClosedPolyhedralSet, PolyhedralSet, dist_to_convex
from ..geometry.linalg import ZERO, dot, qvec
from .complex import arrangement_vertices, build_complex, relative_ranks

log = logging.getLogger(__name__)

POLYGON_SIDES = 16


@dataclass(frozen=True)
class CohomologyRanks:
    """Degree -> rank, zeros omitted."""

    ranks: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(j): int(r) for j, r in dict(self.ranks).items() if r}
        if any(r < 0 for r in clean.values()):
            raise ValueError("ranks are non-negative")
        object.__setattr__(self, "ranks", dict(sorted(clean.items())))

    def __getitem__(self, j):
        return self.ranks.get(j, 0)

    def __eq__(self, other):
        if isinstance(other, dict):
            other = CohomologyRanks(other)
        return isinstance(other, CohomologyRanks) and self.ranks == other.ranks

    def __hash__(self):
        return hash(tuple(self.ranks.items()))

    @property
    def is_zero(self):
        return not self.ranks

    @property
    def euler(self):
        return sum((-1) ** j * r for j, r in self.ranks.items())

    def nonzero_at_or_below(self, k):
        return any(j <= k for j in self.ranks)

    def degrees(self):
        return sorted(self.ranks)

    def to_json(self):
        return {str(j): r for j, r in self.ranks.items()}

    def __repr__(self):
        return f"CohomologyRanks({self.ranks})"


def as_locally_closed(s):
    if isinstance(s, LocallyClosedPolyhedralSet):
        return s
    if isinstance(s, PolyhedralSet):
        return LocallyClosedPolyhedralSet.closed(s)
    if isinstance(s, ConvexPolyhedron):
        return LocallyClosedPolyhedralSet.closed(PolyhedralSet.of(s))
    raise TypeError("expected a polyhedral set")


def _removed(s):
    return s.removed if s.removed is not None else PolyhedralSet.empty(s.dim)


# ---------------------------------------------------------------------------
# windows


def _integer_polygon(sides):
    """Integer vertices of a convex 16-gon close to the circle of radius 10.

    Rounding ``10 (cos, sin)`` at multiples of 22.5 degrees keeps the polygon
    convex and nearly regular while all side normals stay small integers,
    which keeps the exact arithmetic cheap.
    """
    pts = []
    for k in range(sides):
        theta = 2 * math.pi * k / sides
        pts.append((Fraction(round(10 * math.cos(theta))) / 10, Fraction(round(10 * math.sin(theta))) / 10))
    return pts


_CIRCLE = _integer_polygon(POLYGON_SIDES)


def polygon_window(x, radius):
    """Rows ``<a, v> >= b`` of a rational near-regular 16-gon of circumradius ~ ``radius``."""
    x = qvec(x)
    r = Fraction(radius)
    if len(x) == 1:
        return [((Fraction(1),), x[0] - r), ((Fraction(-1),), -x[0] - r)]
    verts = [(x[0] + r * c, x[1] + r * s) for c, s in _CIRCLE]
    rows = []
    for p, q in zip(verts, verts[1:] + verts[:1]):
        # counter-clockwise order: the interior lies to the left
        a = (-(q[1] - p[1]), q[0] - p[0])
        rows.append((a, dot(a, p)))
    return rows


def box_window(lo, hi):
    rows = []
    for i, (l, h) in enumerate(zip(qvec(lo), qvec(hi))):
        e = tuple(Fraction(int(j == i)) for j in range(len(lo)))
        rows.append((e, l))
        rows.append((tuple(-v for v in e), -h))
    return rows


def _l1(a):
    return sum(abs(v) for v in a)


def _pieces(s):
    return list(s.closure.nonempty_pieces) + list(_removed(s).nonempty_pieces)


def feature_radius(s, x):
    """Rational lower bound on the distance from ``x`` to every feature not through ``x``.

    Features are the lines of pieces that contain ``x`` but miss it, and the
    pieces that do not contain ``x`` at all.
    """
    best = None
    for piece in _pieces(s):
        if piece.contains(x):
            for a, b in piece.halfspaces:
                v = dot(a, x) - b
                if v > 0 and any(a):
                    d = v / _l1(a)
                    best = d if best is None else min(best, d)
        else:
            d = max((b - dot(a, x)) / _l1(a) for a, b in piece.halfspaces if any(a) and dot(a, x) < b)
            best = d if best is None else min(best, d)
    return Fraction(1) if best is None else min(best, Fraction(1))


def incident_lines(s, x):
    """Canonical lines through ``x`` of the pieces that contain ``x``."""
    from ..geometry.polyhedra import _canonical_hyperplane

    out = []
    for piece in _pieces(s):
        if not piece.contains(x):
            continue
        for a, b in piece.active_rows(x):
            if not any(a):
                continue
            ca, cb = _canonical_hyperplane(a, b)
            key = (tuple(Fraction(v) for v in ca), Fraction(cb))
            if key not in out:
                out.append(key)
    return out


# ---------------------------------------------------------------------------
# pair cohomology


def pair_cohomology(a, b=None, window=None):
    """Ranks of ``H^j(A, B)`` for closed polyhedral ``B ⊆ A`` inside a window.

    ``window`` is a :class:`ConvexPolyhedron` (bounded); by default ``A`` must
    itself be bounded and a box around it is used.
    """
    a = as_locally_closed(a)
    if a.removed is not None and not a.removed.is_empty:
        raise PreconditionError("pair_cohomology takes closed sets; pass the pair (closure, removed)")
    a = a.closure
    n = a.dim
    b = PolyhedralSet.empty(n) if b is None else (b if isinstance(b, PolyhedralSet) else PolyhedralSet.of(b))
    if b.dim != n:
        raise DimensionMismatch("A and B live in different dimensions")
    if not a.contains_set(b):
        raise PreconditionError("B is not contained in A", code="not-subset")
    if window is None:
        if not a.is_bounded:
            raise PreconditionError("A is unbounded; pass a window")
        lo, hi = _bbox(a)
        rows = box_window([v - 1 for v in lo], [v + 1 for v in hi])
    else:
        if not window.is_bounded:
            raise PreconditionError("window must be bounded")
        rows = [r for r in window.halfspaces if any(r[0])]
    lines = [r for p in list(a.nonempty_pieces) + list(b.nonempty_pieces) for r in p.halfspaces]
    cx = build_complex(n, lines, rows)
    in_a = cx.select(a.contains)
    in_b = cx.select(b.contains)
    keep = [ia - ib for ia, ib in zip(in_a, in_b)]
    return CohomologyRanks(relative_ranks(cx, keep))


def _bbox(s):
    verts = [v for p in s.nonempty_pieces for v in p.vertices()]
    n = s.dim
    if not verts:
        return [ZERO] * n, [ZERO] * n
    return [min(v[i] for v in verts) for i in range(n)], [max(v[i] for v in verts) for i in range(n)]


# ---------------------------------------------------------------------------
# local cohomology


def _affine_parts(phi, x):
    """``xi`` with ``phi(v) = <xi, v - x>`` exactly; raises if not affine or ``phi(x) != 0``."""
    import random

    if isinstance(phi, (tuple, list)):
        return qvec(phi)
    n = len(x)
    phi = phi.with_dim(n) if phi.n != n else phi
    if not phi.base_only:
        raise ParameterError("phi must be a function on the base", code="not-affine")
    if phi.evaluate(x) != 0:
        raise ParameterError("phi(x) must be 0", code="phi-not-zero")
    xi = phi.gradient_base(x)
    rng = random.Random(3)
    for _ in range(4):
        v = tuple(Fraction(rng.randint(-20, 20), rng.randint(1, 7)) for _ in range(n))
        if phi.evaluate(v) != dot(xi, tuple(p - q for p, q in zip(v, x))):
            raise ParameterError("phi is not affine", code="not-affine")
    return xi


def _local_ranks_at(s, x, xi, radius):
    """One evaluation of ``H_Z`` at a fixed window radius; also returns the Euler check."""
    n = s.dim
    window = polygon_window(x, radius)
    lines = incident_lines(s, x)
    sbar, rem = s.closure, _removed(s)

    def phi(v):
        return dot(xi, tuple(p - q for p, q in zip(v, x)))

    if any(xi):
        verts = arrangement_vertices(lines, window)
        if n == 1:
            verts = [(v,) for v in verts]
        vals = [abs(phi(w)) for w in verts if phi(w) != 0]
        delta = min(vals) / 2 if vals else radius / 2
        level = dot(xi, x) - delta
        cx = build_complex(n, lines + [(xi, level)], window)
    else:
        delta, cx = None, build_complex(n, lines, window)
    in_k = cx.select(sbar.contains)
    in_l = [ik & il for ik, il in zip(in_k, cx.select(rem.contains))]
    if delta is None:
        in_kp = [set() for _ in in_k]
    else:
        in_kp = [ik & ip for ik, ip in zip(in_k, cx.select(lambda w: phi(w) <= -delta))]
    rel = relative_ranks(cx, [ik - (il | ip) for ik, il, ip in zip(in_k, in_l, in_kp)])
    whole = relative_ranks(cx, [ik - il for ik, il in zip(in_k, in_l)])
    outside = relative_ranks(cx, [ip - il for ip, il in zip(in_kp, in_l)])
    chi = lambda r: sum((-1) ** j * v for j, v in r.items())
    if chi(rel) != chi(whole) - chi(outside):
        raise AssertionError("Euler characteristics are not additive along the triangle")
    return CohomologyRanks(rel), CohomologyRanks(whole), CohomologyRanks(outside)


def local_cohomology(s, x, phi, eps=None, eps2=None, retries=4, full=False):
    """``H^j_{phi >= 0}(k_S)_x`` for a locally closed polyhedral set in dimension 1 or 2.

    ``phi`` is an affine :class:`ScalarField` on the base with ``phi(x) = 0``
    (or directly its covector).  The ranks are computed with polygonal
    windows of radii ``eps`` and ``eps2 < eps`` and returned only when both
    agree; otherwise both radii are halved up to ``retries`` times.
    """
    s = as_locally_closed(s)
    x = qvec(x)
    if len(x) != s.dim:
        raise DimensionMismatch("point dimension differs from the set")
    if s.dim > 2:
        raise PreconditionError("local cohomology is computed in dimension <= 2")
    if not s.closure.contains(x):
        raise NotInSetError("x is not in the closure of S")
    xi = _affine_parts(phi, x)
    feat = feature_radius(s, x) / 2
    eps = Fraction(eps) if eps is not None else feat
    eps2 = Fraction(eps2) if eps2 is not None else eps / 2
    if not 0 < eps2 < eps:
        raise ParameterError("need 0 < eps2 < eps")
    for _ in range(retries + 1):
        first = _local_ranks_at(s, x, xi, eps)
        second = _local_ranks_at(s, x, xi, eps2)
        if first[0] == second[0]:
            return first if full else first[0]
        log.info("local cohomology unstable at radii %s, %s; shrinking", eps, eps2)
        eps, eps2 = eps2, eps2 / 2
    raise UnstableError("unstable: shrink radius")


# ---------------------------------------------------------------------------
# germ cache


def _primitive_int(v):
    v = qvec(v)
    den = 1
    for c in v:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in v]
    g = 0
    for c in ints:
        g = gcd(g, abs(c))
    return tuple(c // g for c in ints) if g else tuple(ints)


def germ_key(s, x):
    """A hashable description of the germ of ``(Sbar, R)`` at ``x`` up to translation.

    ``None`` when ``x`` is outside the closure.
    """
    s = as_locally_closed(s)
    sbar, rem = s.closure, _removed(s)

    def cones(ps):
        out = set()
        for piece in ps.nonempty_pieces:
            if piece.contains(x):
                out.add(frozenset(_primitive_int(a) for a, _ in piece.active_rows(x) if any(a)))
        return frozenset(out)

    inside = cones(sbar)
    if not inside:
        return None
    return (s.dim, inside, cones(rem))


_GERM_CACHE = {}


def _germ_model(key):
    n, inside, removed = key
    origin = (ZERO,) * n

    def build(cset):
        return PolyhedralSet(
            n, tuple(ConvexPolyhedron(n, tuple((tuple(Fraction(v) for v in a), ZERO) for a in rows)) for rows in cset)
        )

    rem = build(removed)
    return LocallyClosedPolyhedralSet(build(inside), rem if rem.pieces else None), origin


def walls(key):
    """Directions whose pairing with ``xi`` decides the germ's chamber."""
    hit = _WALLS.get(key)
    if hit is None:
        n, inside, removed = key
        normals = {a for rows in inside | removed for a in rows}
        if n == 1:
            hit = ((1,),) if normals else ()
        else:
            # edge directions and normals: with a single line direction the
            # side of the normal matters too
            hit = tuple(sorted({_primitive_int((-a[1], a[0])) for a in normals} | set(normals)))
        _WALLS[key] = hit
    return hit


def chamber(key, xi):
    """``(xi != 0, signs of <xi, d> over the walls)``; ranks are constant on chambers."""
    signs = []
    for d in walls(key):
        v = sum(a * b for a, b in zip(d, xi))
        signs.append((v > 0) - (v < 0))
    return any(xi), tuple(signs)


def germ_ranks(s, x, xi, key=False):
    """Cached ``H_Z`` for ``phi = <xi, . - x>`` via the conic model of the germ.

    A polyhedral germ at ``x`` coincides with the germ of its tangent
    structure, and for a conic germ the ranks only depend on the signs of
    ``xi`` against the lines through ``x``.  The computation therefore runs
    once per (germ, chamber).  ``key`` may pass a precomputed
    :func:`germ_key`.
    """
    if key is False:
        key = germ_key(s, qvec(x))
    if key is None:
        return CohomologyRanks()
    full = (key, chamber(key, xi))
    hit = _GERM_CACHE.get(full)
    if hit is None:
        model, origin = _germ_model(key)
        # the model is exactly conic, so one radius is the germ
        hit = _local_ranks_at(model, origin, qvec(xi), Fraction(1))[0]
        _GERM_CACHE[full] = hit
    return hit


_WALLS = {}


def clear_cache():
    _GERM_CACHE.clear()
    _WALLS.clear()
