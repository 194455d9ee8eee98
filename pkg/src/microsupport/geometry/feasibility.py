"""Exact linear feasibility by Fourier-Motzkin elimination.

The single kernel behind emptiness, containment, dimension and witness
points.  Systems mix equalities, non-strict and strict inequalities::

    <a, x> = b     (eqs)
    <a, x> >= b    (ges)
    <a, x> >  b    (gts)

Equalities are eliminated first by Gaussian elimination; the remaining
inequalities are projected out one variable at a time with integer row
arithmetic.  A satisfying rational point is recovered by back-substitution,
so strict systems yield points in the relative interior.
"""
from fractions import Fraction
from math import gcd, lcm

from .linalg import ZERO, rref


def _primitive_row(coeffs, rhs, strict):
    """Scale ``(coeffs, rhs)`` so that the integer coefficients are coprime."""
    if all(type(c) is int for c in coeffs):
        g = gcd(*coeffs)
        if g == 0:
            return None, rhs, strict
        if g == 1:
            return coeffs, rhs, strict
        return tuple(c // g for c in coeffs), rhs / g, strict
    den = rhs.denominator
    for c in coeffs:
        den = lcm(den, c.denominator)
    ints = [c.numerator * (den // c.denominator) for c in coeffs]
    g = gcd(*ints)
    if g == 0:
        return None, rhs * den, strict
    return tuple(v // g for v in ints), Fraction(rhs.numerator * (den // rhs.denominator), g), strict


def integral_row(row):
    """``(a, b)`` rescaled to coprime integer ``a`` (``b`` stays a Fraction).

    Pre-scaling rows that are used many times lets the elimination skip the
    rational normalization on every call.
    """
    a, b = row
    c, r, _ = _primitive_row(tuple(Fraction(v) for v in a), Fraction(b), False)
    if c is None:
        return tuple(0 for _ in a), r
    return c, r


def _add_row(table, coeffs, rhs, strict):
    """Insert a primitive row, keeping only the tightest bound per normal.

    Returns False if a constant row is violated.
    """
    if coeffs is None:
        return rhs < 0 or (rhs == 0 and not strict)
    old = table.get(coeffs)
    if old is None or rhs > old[0] or (rhs == old[0] and strict and not old[1]):
        table[coeffs] = (rhs, strict)
    return True


def _eliminate(table, remaining, stages):
    """Project out every variable in ``remaining`` (mutated). None if infeasible."""
    while remaining:
        best = None
        for j in remaining:
            pos = neg = 0
            for c in table:
                if c[j] > 0:
                    pos += 1
                elif c[j] < 0:
                    neg += 1
            cost = pos * neg - pos - neg
            if best is None or cost < best[0]:
                best = (cost, j)
        j = best[1]
        remaining.remove(j)
        pos, neg, new = [], [], {}
        for c, (r, s) in table.items():
            if c[j] > 0:
                pos.append((c, r, s))
            elif c[j] < 0:
                neg.append((c, r, s))
            else:
                new[c] = (r, s)
        for cp, rp, sp in pos:
            for cn, rn, sn in neg:
                wp, wn = -cn[j], cp[j]
                coeffs = tuple(wp * a + wn * b for a, b in zip(cp, cn))
                rhs = wp * rp + wn * rn
                g = 0
                for v in coeffs:
                    g = gcd(g, abs(v))
                if g == 0:
                    if not _add_row(new, None, rhs, sp or sn):
                        return None
                    continue
                if not _add_row(new, tuple(v // g for v in coeffs), rhs / g, sp or sn):
                    return None
        stages.append((j, pos, neg))
        table = new
    return table


def _fm(rows, nvars):
    """Eliminate all ``nvars`` variables. Returns a point or None."""
    table = {}
    for coeffs, rhs, strict in rows:
        c, r, s = _primitive_row(coeffs, rhs, strict)
        if not _add_row(table, c, r, s):
            return None
    stages = []
    if _eliminate(table, list(range(nvars)), stages) is None:
        return None
    # every remaining row is constant and was validated on insertion
    x = [ZERO] * nvars
    for j, pos, neg in reversed(stages):
        lo = hi = None
        lo_strict = hi_strict = False
        for c, r, s in pos:
            rest = sum((Fraction(c[i]) * x[i] for i in range(nvars) if i != j and c[i]), ZERO)
            bound = (r - rest) / c[j]
            if lo is None or bound > lo or (bound == lo and s):
                lo, lo_strict = bound, s
        for c, r, s in neg:
            rest = sum((Fraction(c[i]) * x[i] for i in range(nvars) if i != j and c[i]), ZERO)
            bound = (r - rest) / c[j]
            if hi is None or bound < hi or (bound == hi and s):
                hi, hi_strict = bound, s
        if lo is not None and hi is not None:
            x[j] = lo if lo == hi else (lo + hi) / 2
        elif lo is not None:
            x[j] = lo + 1
        elif hi is not None:
            x[j] = hi - 1
        else:
            x[j] = ZERO
    return x


def _f(v):
    return v if type(v) is Fraction else Fraction(v)


def _fr(a):
    return tuple(v if type(v) is Fraction else Fraction(v) for v in a)


def _fr_or_int(a):
    if all(type(v) is int for v in a):
        return a
    return _fr(a)


def find_point(n, eqs=(), ges=(), gts=()):
    """Return a rational point satisfying the system, or ``None``.

    When ``gts`` is non-empty the point satisfies the strict rows strictly.
    """
    eqs = [(_fr(a), _f(b)) for a, b in eqs]
    ineqs = [(_fr_or_int(a), _f(b), False) for a, b in ges]
    ineqs += [(_fr_or_int(a), _f(b), True) for a, b in gts]
    if eqs:
        red, pivots = rref([a + (b,) for a, b in eqs], n + 1)
        if n in pivots:
            return None
        free = [c for c in range(n) if c not in pivots]
        # x_p = row[n] - sum_f row[f] x_f
        subst = {p: row for row, p in zip(red, pivots)}
        reduced = []
        for a, b, s in ineqs:
            coeffs = []
            for f in free:
                coeffs.append(a[f] - sum((a[p] * subst[p][f] for p in pivots), ZERO))
            rhs = b - sum((a[p] * subst[p][n] for p in pivots), ZERO)
            reduced.append((tuple(coeffs), rhs, s))
        y = _fm(reduced, len(free))
        if y is None:
            return None
        x = [ZERO] * n
        for f, val in zip(free, y):
            x[f] = val
        for p in pivots:
            row = subst[p]
            x[p] = row[n] - sum((row[f] * x[f] for f in free), ZERO)
        return tuple(x)
    y = _fm(ineqs, n)
    return None if y is None else tuple(y)


def is_feasible(n, eqs=(), ges=(), gts=()):
    return find_point(n, eqs, ges, gts) is not None


def project_out(n, ges, eliminate):
    """Rows describing the projection of ``{<a, x> >= b}`` along ``eliminate``.

    Returned rows still have length ``n`` with zero coefficients on the
    eliminated variables.  Returns ``None`` when the system is infeasible.
    """
    table = {}
    for a, b in ges:
        c, r, s = _primitive_row(tuple(Fraction(v) for v in a), Fraction(b), False)
        if not _add_row(table, c, r, s):
            return None
    table = _eliminate(table, [j for j in eliminate], [])
    if table is None:
        return None
    return [(tuple(Fraction(v) for v in c), r) for c, (r, _) in table.items()]
