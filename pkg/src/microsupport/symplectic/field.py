"""Scalar fields on ``T*R^n``, the Poisson bracket and the Hamiltonian map.

Sign convention (fixed throughout)::

    {f, g} = sum_j  df/dxi_j * dg/dx_j  -  df/dx_j * dg/dxi_j

so ``{x1, xi1} = -1``.  The Hamiltonian isomorphism sends
``a dx + b dxi`` to ``b d/dx - a d/dxi``, which makes ``H(df)(g) = {f, g}``.
Only the vanishing of brackets is used by the involutivity checks, and that
does not depend on the sign.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from gmpy2 import mpq

from ..errors import DimensionMismatch
from ..geometry.linalg import qvec
from .expr import VAR_RE, Expr, add, compile_polynomial, mul, neg
from .parse import parse_expr


def x_names(n):
    return [f"x{i}" for i in range(1, n + 1)]


def xi_names(n):
    return [f"xi{i}" for i in range(1, n + 1)]


def _min_dim(expr):
    n = 0
    for name in expr.variables():
        n = max(n, int(VAR_RE.match(name).group(2)))
    return n


@dataclass(frozen=True, eq=False)
class ScalarField:
    expr: Expr
    n: int = field(default=None)

    def __post_init__(self):
        if not isinstance(self.expr, Expr):
            object.__setattr__(self, "expr", parse_expr(self.expr))
        need = _min_dim(self.expr)
        if self.n is None:
            object.__setattr__(self, "n", max(need, 1))
        elif self.n < need:
            raise DimensionMismatch(f"expression uses index {need} > n = {self.n}")

    @classmethod
    def parse(cls, src, n=None):
        return cls(parse_expr(src), n)

    def with_dim(self, n):
        return ScalarField(self.expr, n)

    def __str__(self):
        return str(self.expr)

    def _env(self, x, xi):
        if len(x) != self.n or len(xi) != self.n:
            raise DimensionMismatch("point dimension differs from the field")
        env = dict(zip(x_names(self.n), x))
        env.update(zip(xi_names(self.n), xi))
        return env

    @property
    def division_free(self):
        return self.expr.division_free()

    @property
    def base_only(self):
        return not any(v.startswith("xi") for v in self.expr.variables())

    def evaluate(self, x, xi=None):
        """Exact value at a rational point ``(x; xi)`` (``xi`` defaults to 0)."""
        x = qvec(x)
        xi = qvec(xi) if xi is not None else (Fraction(0),) * len(x)
        return self.expr.evaluate(self._env(x, xi))

    @cached_property
    def _compiled(self):
        return compile_polynomial(self.expr, x_names(self.n) + xi_names(self.n))

    def evaluate_fast(self, x, xi):
        """Exact value at a rational point; uses the compiled form when available."""
        fn = self._compiled
        if fn is None:
            return self.evaluate(x, xi)
        if len(x) != self.n or len(xi) != self.n:
            raise DimensionMismatch("point dimension differs from the field")
        return Fraction(fn([mpq(v) for v in (*x, *xi)]))

    def evaluate_float(self, x, xi=None):
        x = tuple(float(v) for v in x)
        xi = tuple(float(v) for v in xi) if xi is not None else (0.0,) * len(x)
        return float(self.expr.evaluate(self._env(x, xi)))

    @cached_property
    def partials(self):
        """``(d/dx_1..d/dx_n, d/dxi_1..d/dxi_n)`` as expression trees."""
        dx = tuple(self.expr.diff(v) for v in x_names(self.n))
        dxi = tuple(self.expr.diff(v) for v in xi_names(self.n))
        return dx, dxi

    def gradient(self, x, xi=None, exact=True):
        """``(df/dx, df/dxi)`` at a point."""
        if exact:
            x = qvec(x)
            xi = qvec(xi) if xi is not None else (Fraction(0),) * len(x)
        else:
            x = tuple(float(v) for v in x)
            xi = tuple(float(v) for v in xi) if xi is not None else (0.0,) * len(x)
        env = self._env(x, xi)
        dx, dxi = self.partials
        return tuple(e.evaluate(env) for e in dx), tuple(e.evaluate(env) for e in dxi)

    # base-only conveniences used by the minimum principle
    def evaluate_base(self, x):
        return self.evaluate(x)

    def gradient_base(self, x):
        return self.gradient(x)[0]

    def differential(self, x, xi=None):
        """The covector ``df`` as a flat tuple ``(dx..., dxi...)``."""
        dx, dxi = self.gradient(x, xi)
        return dx + dxi


def _coerce(f, n=None):
    if isinstance(f, ScalarField):
        return f if n is None or f.n == n else f.with_dim(n)
    return ScalarField.parse(f, n)


def poisson_bracket(f, g):
    """``{f, g}`` as a new field (see the module docstring for the sign)."""
    f, g = _coerce(f), _coerce(g)
    n = max(f.n, g.n)
    f, g = f.with_dim(n), g.with_dim(n)
    fdx, fdxi = f.partials
    gdx, gdxi = g.partials
    out = add(mul(fdxi[0], gdx[0]), neg(mul(fdx[0], gdxi[0])))
    for j in range(1, n):
        out = add(out, add(mul(fdxi[j], gdx[j]), neg(mul(fdx[j], gdxi[j]))))
    return ScalarField(out, n)


def hamiltonian_vector(theta, n=None):
    """``H(theta)`` for ``theta = (a_1..a_n, b_1..b_n)`` meaning ``a dx + b dxi``.

    Returns the tangent vector in the basis ``(d/dx, d/dxi)``, i.e. ``(b, -a)``.
    """
    theta = tuple(theta)
    if n is None:
        n = len(theta) // 2
    if len(theta) != 2 * n:
        raise DimensionMismatch("covector on T*R^n has 2n components")
    a, b = theta[:n], theta[n:]
    return tuple(b) + tuple(-v for v in a)


def apply_vector(vector, g, x, xi):
    """Directional derivative of ``g`` along a tangent vector at ``(x; xi)``."""
    dx, dxi = g.gradient(x, xi)
    return sum((u * v for u, v in zip(vector, dx + dxi)), Fraction(0))
