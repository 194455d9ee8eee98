import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from microsupport.cohoracle import clear_cache
from microsupport.geometry import ConvexPolyhedron, PolyhedralSet

sys.path.insert(0, str(Path(__file__).parent))


def random_polyhedron(rng, n=2, rows=None, coeff=3):
    """A non-empty polyhedron with small integer rows."""
    while True:
        k = rows if rows is not None else rng.randint(1, 3)
        hs = []
        for _ in range(k):
            a = tuple(rng.randint(-coeff, coeff) for _ in range(n))
            if not any(a):
                continue
            hs.append((a, rng.randint(-coeff, coeff)))
        if not hs:
            continue
        p = ConvexPolyhedron(n, tuple(hs))
        if not p.is_empty:
            return p


def random_set(rng, n=2, max_pieces=3):
    return PolyhedralSet(n, tuple(random_polyhedron(rng, n) for _ in range(rng.randint(1, max_pieces))))


def random_bounded_set(rng, n=2, max_pieces=2):
    pieces = []
    for _ in range(rng.randint(1, max_pieces)):
        lo = [rng.randint(-3, 2) for _ in range(n)]
        hi = [v + rng.randint(0, 3) for v in lo]
        box = ConvexPolyhedron.box(lo, hi)
        extra = tuple((tuple(rng.randint(-2, 2) for _ in range(n)), Fraction(rng.randint(-4, 0))) for _ in range(1))
        cut = box.add_rows([r for r in extra if any(r[0])])
        pieces.append(cut if not cut.is_empty else box)
    return PolyhedralSet(n, tuple(pieces))


def random_poly_text(rng, names, terms=4, degree=3, coeff=3):
    """Infix text of a random polynomial with small integer coefficients."""
    out = []
    for _ in range(terms):
        c = rng.randint(-coeff, coeff) or 1
        mono = [rng.choice(names) for _ in range(rng.randint(0, degree))]
        out.append("*".join([f"({c})"] + mono))
    return " + ".join(out)


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture(autouse=True, scope="module")
def _fresh_germ_cache():
    clear_cache()
    yield


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """``report(n, ok, detail)`` records one pass/fail line for the summary."""

    def report(n, ok, detail=""):
        _ACCEPTANCE.append((n, ok, detail))
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
