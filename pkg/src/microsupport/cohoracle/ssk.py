"""Probe-wise test of the definition of ``SS_k`` for constant sheaves.

A probe ``(x; xi)`` counts as evidence for ``SS_k(k_S)`` when some point of
a small stencil around it has ``H^j_{phi >= 0}(k_S) != 0`` for some
``j <= k``, with ``phi = <xi', . - x'>``.  The stencil moves the base point
along the lines through ``x`` and the coordinate axes and tilts ``xi``
slightly, standing in for the open conic neighbourhood of the definition.
Only affine test functions are used, so an "in" label is evidence and an
"out" label is the absence of it on the stencil.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

from ..errors import DimensionMismatch, PreconditionError, UnstableError
from ..geometry import CotangentPoint
from ..geometry.linalg import qvec
from .local import as_locally_closed, chamber, feature_radius, germ_key, germ_ranks, incident_lines

log = logging.getLogger(__name__)

# sixteen integer directions, roughly evenly spread on the circle
DIRECTIONS16 = (
    (1, 0), (2, 1), (1, 1), (1, 2), (0, 1), (-1, 2), (-1, 1), (-2, 1),
    (-1, 0), (-2, -1), (-1, -1), (-1, -2), (0, -1), (1, -2), (1, -1), (2, -1),
)


@dataclass(frozen=True)
class Stencil:
    base_fraction: Fraction = Fraction(1, 4)  # of the feature radius at x
    max_base: Fraction = Fraction(1, 64)
    tilt: Fraction = Fraction(1, 64)  # relative size of the covector perturbation

    def __post_init__(self):
        for name in ("base_fraction", "max_base"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        object.__setattr__(self, "tilt", Fraction(self.tilt))
        if self.tilt < 0:
            raise ValueError("tilt must be non-negative")


def _base_stencil(s, x, stencil):
    n = s.dim
    if germ_key(s, x) is None:
        return []
    h = min(stencil.max_base, stencil.base_fraction * feature_radius(s, x))
    dirs = []
    for a, _ in incident_lines(s, x):
        if n == 2:
            dirs.append((-a[1], a[0]))
    for i in range(n):
        dirs.append(tuple(Fraction(int(j == i)) for j in range(n)))
    pts = [x]
    for d in dirs:
        for sgn in (1, -1):
            p = tuple(v + sgn * h * c for v, c in zip(x, d))
            if p not in pts:
                pts.append(p)
    return pts


def _tilts(xi, stencil):
    out = [xi]
    if len(xi) == 2 and any(xi) and stencil.tilt:
        perp = (-xi[1], xi[0])
        for sgn in (1, -1):
            out.append(tuple(v + sgn * stencil.tilt * w for v, w in zip(xi, perp)))
    return out


def _probe_pairs(probes):
    for p in probes:
        if isinstance(p, CotangentPoint):
            yield p.x, p.xi
        else:
            x, xi = p
            yield qvec(x), qvec(xi)


def ssk_definition_test(s, k, probes, stencil=None):
    """Membership evidence for ``SS_k(k_S)`` at each probe.

    Returns one dict per probe with keys ``x``, ``xi``, ``member``, ``label``
    (``"in"``, ``"out"`` or ``"unstable"``), ``ranks`` (at the probe itself)
    and ``witness`` (the stencil point that produced non-zero ranks).
    """
    s = as_locally_closed(s)
    if s.dim > 2:
        raise PreconditionError("the definition test runs in dimension <= 2")
    stencil = stencil or Stencil()
    bases, keys, tilts = {}, {}, {}
    out = []
    for x, xi in _probe_pairs(probes):
        if len(x) != s.dim or len(xi) != s.dim:
            raise DimensionMismatch("probe dimension differs from the set")
        if x not in bases:
            bases[x] = _base_stencil(s, x, stencil)
            for y in bases[x]:
                if y not in keys:
                    keys[y] = germ_key(s, y)
        if xi not in tilts:
            tilts[xi] = _tilts(xi, stencil)
        record = {"x": x, "xi": xi, "member": False, "label": "out", "ranks": None, "witness": None}
        try:
            record["ranks"] = germ_ranks(s, x, xi, keys[x]) if bases[x] else None
            for y in bases[x]:
                if keys[y] is None:
                    continue
                # tilting only changes the answer when xi sits on a wall
                nonzero, signs = chamber(keys[y], xi)
                etas = tilts[xi] if nonzero and 0 in signs else (xi,)
                for eta in etas:
                    r = germ_ranks(s, y, eta, keys[y])
                    if r.nonzero_at_or_below(k):
                        record.update(member=True, label="in", witness=(y, eta))
                        break
                if record["member"]:
                    break
        except UnstableError:
            record.update(label="unstable")
        out.append(record)
    return out


def probe_grid(lo, hi, count, covectors=DIRECTIONS16, include_zero=True):
    """``count^n`` base points on ``[lo, hi)`` times the covectors (and ``0``)."""
    lo, hi = Fraction(lo), Fraction(hi)
    step = (hi - lo) / count
    axis = [lo + i * step for i in range(count)]
    covs = [qvec(c) for c in covectors]
    n = len(covs[0]) if covs else 1
    if include_zero:
        covs = [(Fraction(0),) * n] + covs
    if n == 1:
        return [CotangentPoint((a,), c) for a in axis for c in covs]
    return [CotangentPoint((a, b), c) for a in axis for b in axis for c in covs]


THREADS_ENV = "MICROSUPPORT_THREADS"


def worker_count(default=1):
    """Worker count from ``MICROSUPPORT_THREADS`` (``default`` when unset or invalid)."""
    import os

    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw)) if raw else default
    except ValueError:
        log.warning("ignoring non-integer %s=%r", THREADS_ENV, raw)
        return default


def _run_chunk(args):
    s, k, probes, stencil = args
    return ssk_definition_test(s, k, probes, stencil)


def run_probes(s, k, probes, stencil=None, workers=None):
    """:func:`ssk_definition_test` split over worker processes by base point.

    Output order matches the input order whatever the worker count, so the
    result is deterministic.
    """
    probes = list(probes)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(probes) < 2:
        return ssk_definition_test(s, k, probes, stencil)
    from concurrent.futures import ProcessPoolExecutor

    pairs = list(_probe_pairs(probes))
    bases = list(dict.fromkeys(x for x, _ in pairs))
    slot = {x: i % workers for i, x in enumerate(bases)}
    chunks = [[] for _ in range(workers)]
    where = []
    for x, xi in pairs:
        c = slot[x]
        where.append((c, len(chunks[c])))
        chunks[c].append((x, xi))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_run_chunk, [(s, k, ch, stencil) for ch in chunks]))
    return [results[c][i] for c, i in where]
