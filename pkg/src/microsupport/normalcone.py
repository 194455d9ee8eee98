"""The 0-conormal cone ``N*_0(S)`` of a closed polyhedral set.

Three routes to the same closed conic set are provided:

* :func:`conormal0_halfspace_test` -- the tangent cone at ``x`` lies in the
  half-space ``{<v, xi> >= 0}``;
* :func:`conormal0_ball_test` -- some open ball ``B_{t|xi|}(x - t xi)``
  misses ``S``;
* :func:`conormal0` -- an exact descriptor assembled cell by cell from the
  polars of the tangent cones, closed at the descriptor level.

:func:`sweep_support_search` turns a half-space witness into an explicit
exterior ball by sweeping a fattened cone towards the set.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt

from .errors import (
    DimensionMismatch,
    NotInSetError,
    ParameterError,
    PreconditionError,
)
from .geometry import (
    ConicPiece,
    ConicSubset,
    ConvexCone,
    ConvexPolyhedron,
    CotangentPoint,
    PolyhedralSet,
    dist_to_convex,
    find_point,
    is_proper_cone,
    polar_cone,
)
from .geometry.arrangement import arrangement_cells
from .geometry.feasibility import project_out
from .geometry.linalg import ZERO, dot, nullspace, q, qvec, rank, solve_unique, sub

log = logging.getLogger(__name__)

DEFAULT_T_GRID = tuple(Fraction(1, 2**k) for k in range(1, 21))


def _require_member(s, x):
    if len(x) != s.dim:
        raise DimensionMismatch("point dimension differs from the set")
    if not s.contains(x):
        raise NotInSetError(f"x = ({', '.join(map(str, x))}) is not in S")


# ---------------------------------------------------------------------------
# characterizations


def conormal0_halfspace_test(s, x, xi):
    """Whether every piece of ``C_x(S)`` lies in ``{v : <v, xi> >= 0}``."""
    x, xi = qvec(x), qvec(xi)
    _require_member(s, x)
    if not any(xi):
        return True
    neg = (tuple(-v for v in xi), ZERO)
    for piece in s.pieces:
        if not piece.contains(x):
            continue
        active = [(a, ZERO) for a, _ in piece.active_rows(x)]
        if find_point(s.dim, ges=active, gts=[neg]) is not None:
            return False
    return True


@dataclass(frozen=True)
class BallTestParams:
    t_grid: tuple = DEFAULT_T_GRID
    mode: str = "exact"
    strict: bool = False

    def __post_init__(self):
        grid = tuple(q(t) for t in self.t_grid)
        if not grid or any(t <= 0 for t in grid):
            raise ParameterError("t_grid must be non-empty and positive")
        if any(b >= a for a, b in zip(grid, grid[1:])):
            raise ParameterError("t_grid must be strictly decreasing")
        if self.mode not in ("exact", "floating"):
            raise ParameterError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "t_grid", grid)


def _ball_misses_exact(s, center, r_sq):
    for piece in s.nonempty_pieces:
        _, _, d_sq = dist_to_convex(center, piece)
        if d_sq < r_sq:
            return False
    return True


def _ball_misses_float(s, center, r_sq):
    # float variant: exact projection, floating comparison with a relative guard
    r = sqrt(float(r_sq))
    for piece in s.nonempty_pieces:
        d, _, _ = dist_to_convex(center, piece)
        if d < r * (1 - 1e-12):
            return False
    return True


def ball_test_report(s, x, xi, params=None):
    """Ball test with a machine-readable reason and the successful ``t``."""
    params = params or BallTestParams()
    x, xi = qvec(x), qvec(xi)
    _require_member(s, x)
    if not any(xi):
        return {"verdict": True, "reason": "zero-covector", "t": None}
    misses = _ball_misses_exact if params.mode == "exact" else _ball_misses_float
    xi_sq = dot(xi, xi)
    # B_{t|xi|}(x - t xi) shrinks monotonically to x as t decreases (the balls
    # are internally tangent at x), so the smallest t decides the whole grid.
    for t in sorted(params.t_grid):
        center = tuple(a - t * b for a, b in zip(x, xi))
        if misses(s, center, t * t * xi_sq):
            return {"verdict": True, "reason": "exterior-ball", "t": t}
        break
    if params.strict and conormal0_halfspace_test(s, x, xi):
        return {"verdict": True, "reason": "halfspace-certified", "t": None}
    return {"verdict": False, "reason": "ball-meets-set", "t": None}


def conormal0_ball_test(s, x, xi, params=None):
    """Whether an open ball ``B_{t|xi|}(x - t xi)`` misses ``S`` for a grid ``t``."""
    return ball_test_report(s, x, xi, params)["verdict"]


# ---------------------------------------------------------------------------
# exact descriptor


def conormal0(s):
    """Exact descriptor of ``N*_0(S)`` for a closed polyhedral set.

    The zero section over every piece is always included.  For each cell of
    the arrangement inside ``S`` carrying a non-trivial fiber, the fiber is the
    intersection over the pieces through the cell of the cones spanned by
    their active normals (the polar of the union of tangent cones); the
    piece stored is ``closure(cell) x fiber``.
    """
    n = s.dim
    zero = ConvexCone.zero(n)
    pieces = [ConicPiece(p, zero) for p in s.nonempty_pieces]
    for cell in arrangement_cells(s):
        if 0 not in cell.signs:
            continue
        rows = []
        for piece in s.nonempty_pieces:
            if not piece.contains(cell.witness):
                continue
            gens = [a for a, _ in piece.active_rows(cell.witness)]
            rows.extend(ConvexCone.generated_by(gens, n).halfspaces)
        fiber = ConvexCone(n, tuple(rows))
        if fiber.is_zero():
            continue
        pieces.append(ConicPiece(cell.closure, fiber))
    return ConicSubset(n, tuple(pieces))


def openness_criterion(s):
    """True iff every fiber of ``N*_0(S)`` is ``{0}``."""
    return all(p.fiber.is_zero() for p in conormal0(s).nonempty_pieces)


# ---------------------------------------------------------------------------
# affine embeddings


@dataclass(frozen=True)
class AffineMap:
    """``y = M x + c`` from ``R^m`` to ``R^n``; ``matrix`` has ``n`` rows."""

    matrix: tuple
    offset: tuple

    def __post_init__(self):
        m = tuple(qvec(r) for r in self.matrix)
        c = qvec(self.offset)
        if len(m) != len(c) or len({len(r) for r in m}) != 1:
            raise DimensionMismatch("malformed affine map")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "offset", c)

    @property
    def source_dim(self):
        return len(self.matrix[0])

    @property
    def target_dim(self):
        return len(self.matrix)

    @property
    def columns(self):
        return [tuple(r[j] for r in self.matrix) for j in range(self.source_dim)]

    def is_injective(self):
        return rank(self.matrix, self.source_dim) == self.source_dim

    def __call__(self, x):
        x = qvec(x)
        return tuple(dot(r, x) + c for r, c in zip(self.matrix, self.offset))

    def transpose_apply(self, eta):
        """``M^T eta``: pulls a covector back to the source."""
        return tuple(dot(col, eta) for col in self.columns)

    def _left_inverse(self):
        cols = self.columns
        gram = [[dot(a, b) for b in cols] for a in cols]
        m = self.source_dim
        inv_cols = [solve_unique(gram, [Fraction(int(i == j)) for i in range(m)]) for j in range(m)]
        ginv = [[inv_cols[j][i] for j in range(m)] for i in range(m)]
        # L = (M^T M)^{-1} M^T, an m x n matrix
        return [tuple(sum((ginv[i][k] * self.matrix[r][k] for k in range(m)), ZERO) for r in range(self.target_dim)) for i in range(m)]

    def image_polyhedron(self, poly):
        if not self.is_injective():
            raise ParameterError("affine map is not injective")
        n = self.target_dim
        left = self._left_inverse()
        rows = []
        for a, b in poly.halfspaces:
            # a . L(y - c) >= b
            la = tuple(sum((a[i] * left[i][r] for i in range(self.source_dim)), ZERO) for r in range(n))
            rows.append((la, b + dot(la, self.offset)))
        for u in nullspace(self.columns, n):
            rows.append((u, dot(u, self.offset)))
            rows.append((tuple(-v for v in u), -dot(u, self.offset)))
        return ConvexPolyhedron(n, tuple(rows))

    def image(self, s):
        return PolyhedralSet(self.target_dim, tuple(self.image_polyhedron(p) for p in s.pieces))


def embed_conormal(s, f):
    """``N*_0(f(S))`` as ``f_pi f_d^{-1} N*_0(S)`` for an affine injection ``f``."""
    if s.dim != f.source_dim:
        raise DimensionMismatch("map source dimension differs from the set")
    if not f.is_injective():
        raise ParameterError("linear part of the map is not injective")
    n = f.target_dim
    pieces = []
    for piece in conormal0(s).pieces:
        base = f.image_polyhedron(piece.base)
        # eta is in the new fiber iff M^T eta lies in the old one: a . M^T eta = (M a) . eta
        rows = tuple(tuple(dot(r, a) for r in f.matrix) for a in piece.fiber.halfspaces)
        pieces.append(ConicPiece(base, ConvexCone(n, rows)))
    return ConicSubset(n, tuple(pieces))


# ---------------------------------------------------------------------------
# minimum principle and proper-cone probe


@dataclass
class MinPrincipleVerdict:
    minimizer: tuple
    min_value: Fraction
    covector: tuple
    in_conormal: bool
    below_c: bool
    holds: bool
    reason: str = ""

    def to_json(self):
        return {
            "minimizer": [str(v) for v in self.minimizer],
            "min_value": str(self.min_value),
            "covector": [str(v) for v in self.covector],
            "in_conormal": self.in_conormal,
            "below_c": self.below_c,
            "holds": self.holds,
            "reason": self.reason,
        }


def _quadratic_model(f, n):
    """``(f0, g, H)`` with ``f(x) = f0 + g.x + x^T H x / 2``, checked exactly."""
    import random

    origin = (ZERO,) * n
    f0 = f.evaluate_base(origin)
    g = f.gradient_base(origin)
    hess = [f.gradient_base(tuple(Fraction(int(i == j)) for i in range(n))) for j in range(n)]
    H = [[hess[j][i] - g[i] for j in range(n)] for i in range(n)]
    rng = random.Random(7)
    for _ in range(6):
        x = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n))
        model = f0 + dot(g, x) + sum((x[i] * H[i][j] * x[j] for i in range(n) for j in range(n)), ZERO) / 2
        if f.evaluate_base(x) != model:
            raise PreconditionError("min_principle_check supports affine or quadratic f only")
    return f0, g, H


def _minimize_on_piece(piece, f0, g, H, window):
    """Exact global minimum of a quadratic over ``piece ∩ [-window, window]^n``."""
    from itertools import combinations

    n = piece.dim
    box = ConvexPolyhedron.box((-window,) * n, (window,) * n)
    clipped = piece.intersect(box)
    if clipped.is_empty:
        return None
    rows = clipped.halfspaces
    best = None

    def value(x):
        return f0 + dot(g, x) + sum((x[i] * H[i][j] * x[j] for i in range(n) for j in range(n)), ZERO) / 2

    for size in range(0, n + 1):
        for idx in combinations(range(len(rows)), size):
            A = [rows[i][0] for i in idx]
            if size and rank(A, n) < size:
                continue
            # stationarity on the face: H x + g = A^T lam,  A x = b
            system, rhs = [], []
            for i in range(n):
                system.append(tuple(H[i]) + tuple(-A[k][i] for k in range(size)))
                rhs.append(-g[i])
            for k in range(size):
                system.append(tuple(A[k]) + (ZERO,) * size)
                rhs.append(rows[idx[k]][1])
            sol = solve_unique(system, rhs)
            if sol is None:
                continue
            x = sol[:n]
            if clipped.contains(x):
                val = value(x)
                if best is None or val < best[0]:
                    best = (val, x)
    if all(H[i][j] == 0 for i in range(n) for j in range(n)) and best is not None:
        # affine objective: prefer a relative-interior point of the optimal face
        face = clipped.add_rows([(tuple(-v for v in g), f0 - best[0])])
        x = face.relative_interior_point
        if x is not None:
            best = (value(x), x)
    return best


def min_principle_check(f, s, c=None, window=8):
    """Check the minimum principle for ``N*_0(S)`` on one instance.

    The exact minimizer ``x*`` of ``f`` on ``S`` (affine or quadratic ``f``) is
    located on a bounded window, and ``df(x*)`` is tested for membership in
    ``N*_0(S)``.  The verdict holds when either ``min f >= c`` or the covector
    lies in the cone.
    """
    n = s.dim
    f0, g, H = _quadratic_model(f, n)
    window = Fraction(window)
    results = []
    for w in (window, 2 * window):
        cands = [r for r in (_minimize_on_piece(p, f0, g, H, w) for p in s.nonempty_pieces) if r is not None]
        if not cands:
            raise PreconditionError("S does not meet the window")
        results.append(min(cands, key=lambda r: r[0]))
    if results[1][0] < results[0][0]:
        raise PreconditionError("f is unbounded below (or not proper) on S within the window", code="unbounded")
    value, x = results[0]
    xi = f.gradient_base(x)
    member = conormal0(s).contains(CotangentPoint(x, xi))
    below = c is not None and value < q(c)
    holds = member or (c is not None and not below)
    reason = "covector-in-conormal" if member else ("min-above-c" if holds else "covector-outside-conormal")
    return MinPrincipleVerdict(x, value, xi, member, below, holds, reason)


def proper_cone_probe(s, gamma):
    """Witness ``(x; xi) in N*_0(S)`` with ``xi`` interior to the polar of ``gamma``.

    Returns ``"empty"`` for the empty set.
    """
    if not is_proper_cone(gamma):
        raise ParameterError("gamma is not a proper cone")
    if s.is_empty:
        return "empty"
    if not s.is_bounded:
        raise PreconditionError("S must be bounded")
    polar = polar_cone(gamma)
    xi = tuple(sum(col) for col in zip(*gamma.halfspaces)) if gamma.halfspaces else (ZERO,) * s.dim
    if not polar.in_interior(xi):
        xi = polar.interior_point
    best = None
    for piece in s.nonempty_pieces:
        for v in piece.vertices():
            val = dot(xi, v)
            if best is None or val < best[0]:
                best = (val, v)
    witness = CotangentPoint(best[1], xi)
    if not conormal0(s).contains(witness):
        raise AssertionError("minimum principle violated at the support point")
    return witness


# ---------------------------------------------------------------------------
# sweeping-cone construction


@dataclass(frozen=True)
class SweepParams:
    gamma: ConvexCone
    epsilon: Fraction
    v: tuple
    delta: Fraction
    rho: Fraction

    def __post_init__(self):
        for name in ("epsilon", "delta", "rho"):
            val = q(getattr(self, name))
            if val <= 0:
                raise ParameterError(f"{name} must be positive")
            object.__setattr__(self, name, val)
        object.__setattr__(self, "v", qvec(self.v))
        if not is_proper_cone(self.gamma):
            raise ParameterError("gamma is not a proper cone")
        if not self.gamma.in_interior(self.v):
            raise ParameterError("v is not in the interior of gamma")


@dataclass(frozen=True)
class Neighborhood:
    """Conic neighborhood of ``(x0; xi0)``: base radius and minimal direction cosine."""

    base_radius: Fraction = Fraction(1, 4)
    min_cos: float = 0.9

    def contains(self, p0, p1):
        d = sub(p1.x, p0.x)
        if dot(d, d) > self.base_radius**2:
            return False
        a, b = p0.xi, p1.xi
        num = float(dot(a, b))
        den = sqrt(float(dot(a, a)) * float(dot(b, b)))
        return den > 0 and num / den >= self.min_cos


@dataclass
class SweepResult:
    point: CotangentPoint
    c_low: Fraction
    c_high: Fraction
    ball_center: tuple
    ball_radius_sq: Fraction
    params: SweepParams

    def to_json(self):
        return {
            "point": {"x": [str(v) for v in self.point.x], "xi": [str(v) for v in self.point.xi]},
            "c_low": str(self.c_low),
            "c_high": str(self.c_high),
            "ball_center": [str(v) for v in self.ball_center],
            "ball_radius_sq": str(self.ball_radius_sq),
        }


def _minkowski_with_cone(poly, gamma):
    """H-representation of ``poly + gamma`` by projecting out the summand."""
    n = poly.dim
    rows = []
    # variables (z, p): p in poly, z - p in gamma
    for a, b in poly.halfspaces:
        rows.append(((ZERO,) * n + a, b))
    for c in gamma.halfspaces:
        rows.append((c + tuple(-v for v in c), ZERO))
    proj = project_out(2 * n, rows, range(n, 2 * n))
    if proj is None:
        return ConvexPolyhedron.empty(n)
    return ConvexPolyhedron(n, tuple((a[:n], b) for a, b in proj if any(a[:n]) or b > 0))


def _split_sum(y, poly, gamma):
    """``p in poly``, ``g in gamma`` with ``p + g = y``."""
    n = poly.dim
    eqs = [(tuple(Fraction(int(i == j)) for j in range(n)) * 2, y[i]) for i in range(n)]
    ges = [(a + (ZERO,) * n, b) for a, b in poly.halfspaces]
    ges += [((ZERO,) * n + c, ZERO) for c in gamma.halfspaces]
    sol = find_point(2 * n, eqs=eqs, ges=ges)
    return sol[:n], sol[n:]


def _sqrt_floor(x, den=10**6):
    """A rational ``r <= sqrt(x)`` close to it."""
    r = Fraction(int(sqrt(float(x)) * den), den)
    while r * r > x:
        r -= Fraction(1, den)
    return max(r, ZERO)


def _orthogonal_basis(xi):
    n = len(xi)
    basis = []
    for u in nullspace([xi], n):
        for b in basis:
            u = tuple(ui - dot(u, b) / dot(b, b) * bi for ui, bi in zip(u, b))
        basis.append(u)
    return basis


def default_sweep_params(s, p, nbhd=None, aperture=Fraction(1, 4)):
    """Parameters satisfying the sweep constraints for ``p``, built exactly."""
    nbhd = nbhd or Neighborhood()
    x0, xi0 = p.x, p.xi
    n = len(x0)
    xi_norm = sqrt(float(dot(xi0, xi0)))
    gens = [xi0]
    for b in _orthogonal_basis(xi0):
        lam = Fraction(xi_norm / sqrt(float(dot(b, b)))).limit_denominator(10**6) * aperture
        gens.append(tuple(x + lam * y for x, y in zip(xi0, b)))
        gens.append(tuple(x - lam * y for x, y in zip(xi0, b)))
    gamma_polar = ConvexCone.generated_by(gens, n)
    gamma = polar_cone(gamma_polar)
    v = xi0
    xi_sq = dot(xi0, xi0)
    rho = Fraction(nbhd.base_radius) * Fraction(xi_norm).limit_denominator(10**6) / 16
    for _ in range(60):
        if _cap_is_point(s, x0, xi0, rho, gamma):
            break
        rho /= 2
    else:
        raise ParameterError("could not isolate x0 in the cone cap")
    delta = rho / (2 * dot(v, xi0))
    # epsilon-neighbourhood of -gamma shifted by -delta v stays inside int(-gamma)
    m_sq = min(dot(a, v) ** 2 / dot(a, a) for a in gamma.halfspaces)
    eps = delta * _sqrt_floor(m_sq) / 2
    for _ in range(60):
        if _rim_clear(s, x0, xi0, rho, gamma, eps):
            break
        eps /= 2
    return SweepParams(gamma, eps, v, delta, rho)


def _cap_is_point(s, x0, xi0, rho, gamma):
    """``S ∩ closure(H_-) ∩ (x0 - gamma) ⊆ {x0}``."""
    n = len(x0)
    h_row = (xi0, dot(xi0, x0) - rho)
    # x in x0 - gamma  <=>  <a, x0 - x> >= 0  <=>  <-a, x> >= -<a, x0>
    cone_rows = [(tuple(-v for v in a), -dot(a, x0)) for a in gamma.halfspaces]
    for piece in s.nonempty_pieces:
        base = list(piece.halfspaces) + [h_row] + cone_rows
        for i in range(n):
            e = tuple(Fraction(int(j == i)) for j in range(n))
            for sgn in (1, -1):
                row = (tuple(sgn * v for v in e), sgn * x0[i])
                if find_point(n, ges=base, gts=[row]) is not None:
                    return False
    return True


def _rim_clear(s, x0, xi0, rho, gamma, eps):
    """Points of ``S`` on ``{<x - x0, xi0> = -rho}`` stay farther than eps from ``x0 - gamma``."""
    eps_sq = eps * eps
    level = dot(xi0, x0) - rho
    for piece in s.nonempty_pieces:
        rim = piece.add_rows([(xi0, level), (tuple(-v for v in xi0), -level)])
        if rim.is_empty:
            continue
        _, _, d_sq = dist_to_convex(x0, _minkowski_with_cone(rim, gamma))
        if d_sq <= eps_sq:
            return False
    return True


def sweep_support_search(s, p, params=None, nbhd=None, iterations=48):
    """A point ``p1`` near ``p`` passing the exterior-ball test; see :func:`sweep_support_trace`."""
    return sweep_support_trace(s, p, params, nbhd, iterations).point


def sweep_support_trace(s, p, params=None, nbhd=None, iterations=48):
    """Exterior-ball witness near ``p`` built by sweeping ``W_t = x0 + gamma^a_eps + t v``.

    ``c = sup{t : W_t ∩ S0 = ∅}`` is bracketed by rational bisection using the
    exact emptiness test ``dist(x0 + t v, P + gamma) >= eps`` per piece ``P``
    of ``S0 = S ∩ closure(H_-)``.  At the lower bracket the closest pair
    between ``S0`` and the swept cone gives ``x1`` and ``xi1 = x1 - w``; the
    ball of radius ``|xi1|`` around ``w`` misses ``S0``.
    """
    nbhd = nbhd or Neighborhood()
    x0, xi0 = p.x, p.xi
    if not any(xi0):
        raise PreconditionError("xi = 0 is handled directly by the ball test", code="zero-covector")
    if not conormal0_halfspace_test(s, x0, xi0):
        raise PreconditionError("p does not satisfy the half-space condition", code="hypothesis-violated")
    auto = params is None
    if auto:
        params = default_sweep_params(s, p, nbhd)
    if not polar_cone(params.gamma).in_interior(xi0):
        raise ParameterError("xi0 is not interior to the polar of gamma")
    for attempt in range(12):
        result = _sweep_once(s, x0, xi0, params, iterations)
        if nbhd.contains(p, result.point):
            break
        if not auto:
            raise ParameterError("the sweep left the requested neighborhood; shrink rho/epsilon")
        params = SweepParams(params.gamma, params.epsilon / 4, params.v, params.delta / 4, params.rho / 4)
    else:
        raise ParameterError("the sweep did not settle inside the neighborhood")
    if not conormal0_ball_test(s, result.point.x, result.point.xi):
        raise AssertionError("sweep output failed the exterior-ball test")
    return result


def _sweep_once(s, x0, xi0, params, iterations):
    gamma, eps, v, rho = params.gamma, params.epsilon, params.v, params.rho
    if not _cap_is_point(s, x0, xi0, rho, gamma):
        raise ParameterError("S meets x0 - gamma inside closure(H_-) away from x0")
    level = dot(xi0, x0) - rho
    s0 = [piece.add_rows([(xi0, level)]) for piece in s.nonempty_pieces]
    s0 = [piece for piece in s0 if not piece.is_empty]
    sums = [(piece, _minkowski_with_cone(piece, gamma)) for piece in s0]
    eps_sq = eps * eps

    def closest(t):
        qpt = tuple(a + t * b for a, b in zip(x0, v))
        best = None
        for piece, dsum in sums:
            _, y, d_sq = dist_to_convex(qpt, dsum)
            if best is None or d_sq < best[0]:
                best = (d_sq, y, piece, qpt)
        return best

    lo = Fraction(-1)
    while closest(lo)[0] < eps_sq:
        lo *= 2
    hi = ZERO  # x0 is in W_0 ∩ S0
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if closest(mid)[0] >= eps_sq:
            lo = mid
        else:
            hi = mid
    d_sq, y, piece, qpt = closest(lo)
    x1, g = _split_sum(y, piece, gamma)
    w = tuple(a - b for a, b in zip(qpt, g))
    xi1 = tuple(a - b for a, b in zip(x1, w))
    return SweepResult(CotangentPoint(x1, xi1), lo, hi, w, d_sq, params)
