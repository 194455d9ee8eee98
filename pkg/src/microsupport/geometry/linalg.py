"""Small exact linear algebra over the rationals.

Vectors are tuples of :class:`fractions.Fraction`.  Everything here is sized
for ambient dimensions up to eight, so plain Gaussian elimination is used.
"""
from fractions import Fraction
from math import gcd

ZERO = Fraction(0)
ONE = Fraction(1)


def q(value):
    """Coerce ints, floats, strings like ``"3/4"`` or Fractions to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    return Fraction(value)


def qvec(values):
    return tuple(q(v) for v in values)


def dot(a, b):
    return sum((x * y for x, y in zip(a, b)), ZERO)


def add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a):
    return tuple(c * x for x in a)


def norm_sq(a):
    return dot(a, a)


def is_zero(a):
    return all(x == 0 for x in a)


def unit(n, i, sign=1):
    return tuple(Fraction(sign) if j == i else ZERO for j in range(n))


def rref(rows, ncols):
    """Reduced row echelon form. Returns ``(rows, pivot_columns)``."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return [tuple(row) for row in m[:r]], pivots


def rank(rows, ncols):
    return len(rref(rows, ncols)[1])


def nullspace(rows, n):
    """Basis of ``{v : <r, v> = 0 for every r in rows}``."""
    rows = [tuple(r) for r in rows]
    if not rows:
        return [unit(n, i) for i in range(n)]
    red, pivots = rref(rows, n)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def solve(A, b):
    """Solve ``A x = b``; return one solution or ``None`` if inconsistent.

    Free variables are set to zero.
    """
    n = len(A[0]) if A else 0
    aug = [tuple(row) + (bi,) for row, bi in zip(A, b)]
    red, pivots = rref(aug, n + 1)
    if n in pivots:
        return None
    x = [ZERO] * n
    for row, p in zip(red, pivots):
        x[p] = row[n]
    return tuple(x)


def solve_unique(A, b):
    """Solve a square-or-tall system with a unique solution, else ``None``."""
    n = len(A[0]) if A else 0
    if rank(A, n) < n:
        return None
    return solve(A, b)


def primitive(vec):
    """Scale a rational vector to a primitive integer vector (same direction)."""
    den = 1
    for x in vec:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g == 0:
        return tuple(ints)
    return tuple(v // g for v in ints)


def canonical_direction(vec):
    """Primitive integer representative of the ray through ``vec``."""
    return primitive(qvec(vec))


def canonical_line(vec):
    """Primitive representative of the line through ``vec`` (sign fixed)."""
    p = primitive(qvec(vec))
    for x in p:
        if x != 0:
            return p if x > 0 else tuple(-v for v in p)
    return p


def orth_complement_rows(vectors, n):
    """Rows spanning the orthogonal complement of ``span(vectors)``."""
    return nullspace(vectors, n)


def fmt(x):
    """Rational to the ``"p/q"`` string form used in JSON."""
    x = q(x)
    return str(x)
