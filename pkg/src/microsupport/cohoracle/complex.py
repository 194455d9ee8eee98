"""Cell complexes of line (or point) arrangements inside a convex window.

Cells are relatively open and are identified by their sign vectors against
the arrangement.  The closure of a cell ``c`` contains the cell ``d`` iff
``sign(d)_j`` is ``0`` or ``sign(c)_j`` for every ``j``.

Orientation: an edge runs along ``d = (-a2, a1)`` for its line
``<a, x> = b`` and ``del e = v_end - v_start``; a face is oriented
counter-clockwise, so ``del f`` has ``+e`` when ``f`` lies left of ``e``.
In dimension one the "lines" are points and ``del e = v_right - v_left``.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm

from gmpy2 import mpq


# Arrangement arithmetic runs on gmpy2 rationals (exact, much faster than
# Fraction); witnesses are handed back as Fractions.


def dot(a, p):
    return sum(x * y for x, y in zip(a, p))


def _frac(p):
    return tuple(Fraction(int(v.numerator), int(v.denominator)) for v in p)


def _sgn(v):
    return (v > 0) - (v < 0)


@dataclass
class CellComplex:
    dim: int
    lines: list  # canonical (a, b), integer
    cells: list = field(default_factory=list)  # per degree: list of (signs, witness)
    boundary: list = field(default_factory=list)  # per degree k>=1: {(i_k, j_{k-1}): coeff}

    def count(self, k):
        return len(self.cells[k]) if k < len(self.cells) else 0

    @property
    def euler(self):
        return sum((-1) ** k * len(c) for k, c in enumerate(self.cells))

    def select(self, predicate):
        """Indices per degree of the cells whose witness satisfies ``predicate``."""
        return [{i for i, (_, w) in enumerate(cs) if predicate(w)} for cs in self.cells]

    def boundary_squared_zero(self):
        for k in range(2, len(self.cells)):
            outer, inner = self.boundary[k], self.boundary[k - 1]
            acc = {}
            for (f, e), c1 in outer.items():
                for (e2, v), c2 in inner.items():
                    if e2 == e:
                        acc[(f, v)] = acc.get((f, v), 0) + c1 * c2
            if any(acc.values()):
                return False
        return True


def _signs(lines, p):
    return tuple(_sgn(dot(a, p) - b) for a, b in lines)


def _canon(a, b):
    """Integer-primitive line with first nonzero coefficient positive."""
    den = 1
    for v in tuple(a) + (b,):
        den = lcm(den, int(v.denominator))
    ints = [int(v * den) for v in tuple(a) + (b,)]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    lead = next(v for v in ints[:-1] if v != 0)
    if lead < 0:
        g = -g
    return tuple(mpq(v // g) for v in ints[:-1]), mpq(ints[-1] // g)


def _mpq_rows(rows):
    return [(tuple(mpq(v.numerator, v.denominator) if isinstance(v, Fraction) else mpq(v) for v in a),
             mpq(b.numerator, b.denominator) if isinstance(b, Fraction) else mpq(b)) for a, b in rows]


def _inside(window, p):
    return all(dot(a, p) >= b for a, b in window)


def build_complex(dim, lines, window):
    """Complex of the arrangement of ``lines`` restricted to the convex ``window``.

    ``window`` is a list of rows ``<a, x> >= b`` describing a bounded convex
    polygon (interval); its boundary lines are added to the arrangement.
    """
    window = _mpq_rows(window)
    table = []
    for a, b in _mpq_rows(lines) + window:
        if not any(a):
            continue
        key = _canon(a, b)
        if key not in table:
            table.append(key)
    if dim == 1:
        return _build_1d(table, window)
    if dim == 2:
        return _build_2d(table, window)
    raise ValueError("cell complexes are built in dimension 1 or 2 only")


def _build_1d(table, window):
    pts = sorted({b / a[0] for a, b in table if _inside(window, (b / a[0],))})
    verts = [((_signs(table, (p,))), _frac((p,))) for p in pts]
    edges, bd = [], {}
    for i in range(len(pts) - 1):
        m = ((pts[i] + pts[i + 1]) / 2,)
        edges.append((_signs(table, m), _frac(m)))
        bd[(i, i + 1)] = 1
        bd[(i, i)] = -1
    return CellComplex(1, table, [verts, edges], [None, bd])


def arrangement_vertices(lines, window):
    """Pairwise intersection points of ``lines`` (and window sides) inside the window."""
    window = _mpq_rows(window)
    table = [_canon(a, b) for a, b in _mpq_rows(lines) + window if any(a)]
    if len(table[0][0]) == 1:
        return [_frac((p,))[0] for p in sorted({b / a[0] for a, b in table if _inside(window, (b / a[0],))})]
    return [_frac(p) for p in _vertex_index(table, window)]


def _meet(l1, l2):
    (a1, b1), (a2, b2) = l1, l2
    det = a1[0] * a2[1] - a1[1] * a2[0]
    if det == 0:
        return None
    return ((b1 * a2[1] - b2 * a1[1]) / det, (a1[0] * b2 - a2[0] * b1) / det)


def _clip(line, window):
    """End points of ``line`` inside the convex window (possibly none)."""
    a, b = line
    d = (-a[1], a[0])
    p0 = (a[0] * b / (a[0] ** 2 + a[1] ** 2), a[1] * b / (a[0] ** 2 + a[1] ** 2))
    lo = hi = None
    for c, e in window:
        # <c, p0 + t d> >= e
        rate = dot(c, d)
        slack = dot(c, p0) - e
        if rate == 0:
            if slack < 0:
                return []
            continue
        t = -slack / rate
        if rate > 0:
            lo = t if lo is None or t > lo else lo
        else:
            hi = t if hi is None or t < hi else hi
    if lo is None or hi is None or lo > hi:
        return []
    return [(p0[0] + t * d[0], p0[1] + t * d[1]) for t in ({lo, hi})]


def _vertex_index(table, window):
    """Vertices: window corners, line/window crossings and interior crossings."""
    wkeys = {_canon(a, b) for a, b in window if any(a)}
    inner = [ln for ln in table if ln not in wkeys]
    vpos = {}
    for p in _window_corners(window):
        vpos.setdefault(p, len(vpos))
    for ln in inner:
        for p in _clip(ln, window):
            vpos.setdefault(p, len(vpos))
    for l1, l2 in combinations(inner, 2):
        p = _meet(l1, l2)
        if p is not None and p not in vpos and _inside(window, p):
            vpos[p] = len(vpos)
    return vpos


def _window_corners(window):
    rows = [r for r in window if any(r[0])]
    out = []
    for r1, r2 in zip(rows, rows[1:] + rows[:1]):
        p = _meet(r1, r2)
        if p is not None and _inside(window, p):
            out.append(p)
    if len(out) < 3:
        # rows not given in cyclic order: fall back to all pairs
        out = [p for r1, r2 in combinations(rows, 2) for p in [_meet(r1, r2)] if p is not None and _inside(window, p)]
    return out


def _build_2d(table, window):
    vpos = _vertex_index(table, window)
    verts = [(_signs(table, p), _frac(p)) for p in vpos]
    edges, ebd, eline = [], {}, []
    for li, (a, b) in enumerate(table):
        d = (-a[1], a[0])
        on = sorted((p for p in vpos if dot(a, p) == b), key=lambda p: dot(d, p))
        for p, q in zip(on, on[1:]):
            m = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
            k = len(edges)
            edges.append((_signs(table, m), m))
            eline.append((li, d))
            ebd[(k, vpos[q])] = ebd.get((k, vpos[q]), 0) + 1
            ebd[(k, vpos[p])] = ebd.get((k, vpos[p]), 0) - 1
    faces, findex = [], {}
    for k, (sig, m) in enumerate(edges):
        li, d = eline[k]
        a, b = table[li]
        for s in (1, -1):
            fs = sig[:li] + (s,) + sig[li + 1:]
            if fs in findex:
                continue
            w = _offset(table, li, m, a, s)
            if not _inside(window, w) or _signs(table, w) != fs:
                continue
            findex[fs] = len(faces)
            faces.append((fs, w))
    fbd = {}
    emid = [m for _, m in edges]
    edges = [(sig, _frac(m)) for sig, m in edges]
    for fi, (fs, w) in enumerate(faces):
        for k, (es, _) in enumerate(edges):
            if all(e == 0 or e == f for e, f in zip(es, fs)):
                m = emid[k]
                d = eline[k][1]
                u = (w[0] - m[0], w[1] - m[1])
                fbd[(fi, k)] = 1 if d[0] * u[1] - d[1] * u[0] > 0 else -1
    faces = [(fs, _frac(w)) for fs, w in faces]
    return CellComplex(2, table, [verts, edges, faces], [None, ebd, fbd])


def _offset(table, li, m, a, s):
    """A point just off the edge midpoint ``m`` on side ``s`` of line ``li``."""
    step = (s * a[0], s * a[1])
    t = mpq(1)
    for j, (c, e) in enumerate(table):
        if j == li:
            continue
        v = dot(c, m) - e
        r = dot(c, step)
        if r != 0 and _sgn(r) != _sgn(v):
            t = min(t, abs(v / r) / 2)
    return (m[0] + t * step[0], m[1] + t * step[1])


def _rank(entries, rows, cols):
    """Rank over Q of the sparse matrix restricted to ``rows`` x ``cols``."""
    rindex = {r: i for i, r in enumerate(sorted(rows))}
    cindex = {c: i for i, c in enumerate(sorted(cols))}
    mat = {}
    for (r, c), v in entries.items():
        if v and r in rindex and c in cindex:
            mat.setdefault(rindex[r], {})[cindex[c]] = mpq(v)
    rank = 0
    pivot_rows = list(mat.values())
    while pivot_rows:
        row = pivot_rows.pop()
        if not row:
            continue
        col, pv = next(iter(row.items()))
        rank += 1
        rest = []
        for other in pivot_rows:
            f = other.get(col)
            if f:
                f = f / pv
                for c, v in row.items():
                    nv = other.get(c, 0) - f * v
                    if nv:
                        other[c] = nv
                    else:
                        other.pop(c, None)
            if other:
                rest.append(other)
        pivot_rows = rest
    return rank


def relative_ranks(cx, keep):
    """Ranks of ``H^j(K, A)`` where ``keep[j]`` indexes the cells of ``K - A``."""
    top = len(cx.cells) - 1
    ranks = {}
    coboundary = [0] * (top + 2)
    for k in range(1, top + 1):
        coboundary[k - 1] = _rank(cx.boundary[k], keep[k], keep[k - 1])
    for j in range(top + 1):
        r = len(keep[j]) - coboundary[j] - (coboundary[j - 1] if j else 0)
        if r:
            ranks[j] = r
    return ranks
