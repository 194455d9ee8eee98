"""Relatively open cells of the hyperplane arrangement of a polyhedral set.

Every hyperplane supporting a row of some piece is collected; a cell is a
non-empty set with a fixed sign (``+1``, ``0``, ``-1``) against each of them.
On a cell, membership in each piece and the set of active rows are
constant, which is what the conormal and stratification code relies on.
"""
from dataclasses import dataclass
from functools import cached_property

from .feasibility import find_point
from .linalg import ZERO, dot, qvec
from .polyhedra import ConvexPolyhedron, _canonical_hyperplane


@dataclass(frozen=True)
class Cell:
    hyperplanes: tuple  # ((a, b), ...) integer canonical, meaning <a, x> = b
    signs: tuple
    witness: tuple  # a point of the (relatively open) cell

    @property
    def dim(self):
        return len(self.witness)

    def rows(self):
        """``(eqs, strict)`` describing the relatively open cell."""
        eqs, gts = [], []
        for (a, b), s in zip(self.hyperplanes, self.signs):
            if s == 0:
                eqs.append((a, b))
            elif s > 0:
                gts.append((a, b))
            else:
                gts.append((tuple(-v for v in a), -b))
        return eqs, gts

    @cached_property
    def closure(self):
        rows = []
        for (a, b), s in zip(self.hyperplanes, self.signs):
            if s >= 0:
                rows.append((a, b))
            if s <= 0:
                rows.append((tuple(-v for v in a), -b))
        return ConvexPolyhedron(self.dim, tuple(rows))

    @cached_property
    def dimension(self):
        from .linalg import rank

        return self.dim - rank([a for (a, _), s in zip(self.hyperplanes, self.signs) if s == 0], self.dim)

    def contains(self, x):
        x = qvec(x)
        for (a, b), s in zip(self.hyperplanes, self.signs):
            v = dot(a, x) - b
            if (v > 0) - (v < 0) != s:
                return False
        return True


def _sign(a, b, x):
    v = dot(a, x) - b
    return (v > 0) - (v < 0)


def _split(n, eqs, gts, witness, a, b, allowed):
    """Children of a cell against one hyperplane: ``[(sign, eqs, gts, witness)]``."""
    ws = _sign(a, b, witness)
    out = []
    if ws in allowed:
        out.append((ws, eqs + ([(a, b)] if ws == 0 else []),
                    gts + ([] if ws == 0 else [(a, b) if ws > 0 else (tuple(-v for v in a), -b)]), witness))
    neg = (tuple(-v for v in a), -b)
    if ws == 0:
        # the cell meets the hyperplane; it crosses it iff one open side is hit
        for s in (1, -1):
            if s not in allowed:
                continue
            row = (a, b) if s > 0 else neg
            pt = find_point(n, eqs=eqs, gts=gts + [row])
            if pt is not None:
                out.append((s, eqs, gts + [row], pt))
    elif 0 in allowed or -ws in allowed:
        pt = find_point(n, eqs=eqs + [(a, b)], gts=gts)
        if pt is not None:
            if 0 in allowed:
                out.append((0, eqs + [(a, b)], gts, pt))
            if -ws in allowed:
                row = (a, b) if -ws > 0 else neg
                pt2 = find_point(n, eqs=eqs, gts=gts + [row])
                out.append((-ws, eqs, gts + [row], pt2))
    return out


def arrangement_cells(s, extra_hyperplanes=()):
    """Cells of the arrangement of ``s`` that lie inside ``s``.

    ``extra_hyperplanes`` (pairs ``(a, b)``) refine the decomposition further.
    """
    hyps = list(s.hyperplanes())
    for a, b in extra_hyperplanes:
        key = _canonical_hyperplane(a, b)
        if key not in hyps:
            hyps.append(key)
    hyps = [(tuple(ZERO + v for v in a), ZERO + b) for a, b in hyps]
    index = {(tuple(int(v) for v in a), int(b)): i for i, (a, b) in enumerate(hyps)}
    n = s.dim
    cells = {}
    for piece in s.nonempty_pieces:
        allowed = [(1, 0, -1)] * len(hyps)
        for a, b in piece.halfspaces:
            if not any(a):
                continue
            ca, cb = _canonical_hyperplane(a, b)
            i = index[(ca, cb)]
            # orientation: is the row a positive multiple of the canonical normal?
            lead = next(k for k, v in enumerate(ca) if v != 0)
            orient = 1 if (a[lead] > 0) == (ca[lead] > 0) else -1
            allowed[i] = tuple(x for x in allowed[i] if x in (0, orient))
        todo = [((), [], [], piece.witness)]
        for i, (a, b) in enumerate(hyps):
            nxt = []
            for signs, eqs, gts, w in todo:
                for sgn, e2, g2, w2 in _split(n, eqs, gts, w, a, b, allowed[i]):
                    nxt.append((signs + (sgn,), e2, g2, w2))
            todo = nxt
        for signs, _, _, w in todo:
            cells.setdefault(signs, Cell(tuple(hyps), signs, w))
    return [cells[k] for k in sorted(cells)]
