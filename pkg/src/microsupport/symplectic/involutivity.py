"""Sampled verification of (weak) involutivity.

A set is weakly involutive when every bracket ``{f, g}`` of C^1 functions
vanishing on it vanishes on it too.  The check evaluates both the
hypothesis (``f = g = 0`` on the samples) and the conclusion on a finite
sample, so a pass is evidence on an instance and never a proof.
"""
import random
from dataclasses import dataclass
from fractions import Fraction

from ..errors import EstimateOnlyError, ParameterError
from ..geometry import (
    ConicSubset,
    ConvexPolyhedron,
    CotangentPoint,
    PolyhedralSet,
    normal_cone_pair_sampled,
)
from .field import ScalarField, _coerce, hamiltonian_vector, poisson_bracket


@dataclass
class BracketReport:
    hypothesis_max: float
    bracket_max: float
    tol: float
    verdict: str
    samples: int
    bracket_tol: float = None

    def to_json(self):
        return {
            "hypothesis_max": self.hypothesis_max,
            "bracket_max": self.bracket_max,
            "tol": self.tol,
            "bracket_tol": self.bracket_tol if self.bracket_tol is not None else self.tol,
            "verdict": self.verdict,
            "samples": self.samples,
        }

    @property
    def passed(self):
        return self.verdict == "pass"


def _value(field, p, exact):
    if exact:
        return abs(float(field.evaluate_fast(p.x, p.xi)))
    return abs(field.evaluate_float(p.x, p.xi))


def weak_involutivity_check(a, f, g, tol=1e-9, bracket_tol=None, rng=None, count=500):
    """Evaluate ``|f|, |g|`` and ``|{f, g}|`` on samples of ``a``.

    ``a`` is a :class:`ConicSubset`; its stored samples are used when present,
    otherwise ``count`` points are drawn from the exact descriptor.
    """
    if isinstance(a, ConicSubset):
        samples = list(a.samples) if a.samples else (a.sample(rng or random.Random(0), count) if a.exact else [])
        n = a.dim
    else:
        samples = list(a)
        n = samples[0].dim if samples else None
    if not samples:
        raise ParameterError("no samples to evaluate on", code="empty-samples")
    f, g = _coerce(f, n), _coerce(g, n)
    h = poisson_bracket(f, g)
    exact = f.division_free and g.division_free
    hyp = br = 0.0
    for p in samples:
        hyp = max(hyp, _value(f, p, exact), _value(g, p, exact))
        br = max(br, _value(h, p, exact))
    btol = tol if bracket_tol is None else bracket_tol
    if hyp > tol:
        verdict = "hypothesis-violated"
    elif br > btol:
        verdict = "fail"
    else:
        verdict = "pass"
    return BracketReport(hyp, br, tol, verdict, len(samples), bracket_tol)


def remark_ss0():
    """The exact set ``{(x; xi) : xi = 0, x >= 0}`` in ``T*R``."""
    from ..geometry import ConicPiece, ConvexCone

    base = ConvexPolyhedron(1, (((Fraction(1),), Fraction(0)),))
    return ConicSubset(1, (ConicPiece(base, ConvexCone.zero(1)),))


def strong_involutivity_demo(rng=None, budget=400, with_oracle=True):
    """Reproduce the failure of strong involutivity for ``k_{x>0}`` on ``R``.

    ``SS_0`` is assembled from the candidate pieces of the 0-conormal cone of
    the closure, keeping those the cohomological oracle confirms.  At
    ``p = (0; 0)`` the sampled normal cone ``C_p(SS_0, SS_0)`` has no
    ``dxi`` component while ``H(-dxi) = -d/dx`` leaves the tangent cone
    ``C_p(SS_0)``.
    """
    rng = rng or random.Random(0)
    ss0 = _remark_ss0_from_oracle() if with_oracle else remark_ss0()
    exact_match = ss0.same_set(remark_ss0())
    # the set as a polyhedron in the (x, xi) plane
    planar = PolyhedralSet.of(*(piece.joint_polyhedron() for piece in ss0.nonempty_pieces))
    p = (Fraction(0), Fraction(0))
    sampled = normal_cone_pair_sampled(planar, planar, p, budget, rng)
    # -dxi as a covector on T*R: components (a, b) = (0, -1)
    in_kernel = sampled.all_satisfy(lambda v: v[1] == 0)
    h = hamiltonian_vector((Fraction(0), Fraction(-1)), 1)
    tangent = planar.tangent_cone(p)
    h_in_tangent = any(c.contains(h) for c in tangent)
    return {
        "ss0_pieces": [
            {"base": [[str(v) for v in a] + [str(b)] for a, b in piece.base.halfspaces],
             "fiber": [[str(v) for v in a] for a in piece.fiber.halfspaces]}
            for piece in ss0.nonempty_pieces
        ],
        "ss0_is_ray": exact_match,
        "sampled_directions": len(sampled.vectors),
        "cp_in_kernel_of_minus_dxi": in_kernel,
        "hamiltonian_of_minus_dxi": [str(v) for v in h],
        "h_not_in_tangent_cone": not h_in_tangent,
        "verdict": exact_match and in_kernel and not h_in_tangent,
    }


def _remark_ss0_from_oracle():
    from ..cohoracle import ssk_definition_test
    from ..geometry import ConicPiece, ConvexCone, LocallyClosedPolyhedralSet
    from ..normalcone import conormal0

    one = Fraction(1)
    closure = PolyhedralSet.of(ConvexPolyhedron(1, (((one,), Fraction(0)),)))
    s = LocallyClosedPolyhedralSet(closure, PolyhedralSet.of(ConvexPolyhedron.point((Fraction(0),))))
    kept = []
    for piece in conormal0(closure).nonempty_pieces:
        # split each fiber by sign so that every candidate has a constant germ type
        for sign in (1, -1, 0):
            if sign:
                fiber = piece.fiber.intersect(ConvexCone(1, (((Fraction(sign),)),)))
            else:
                fiber = ConvexCone.zero(1)
            cand = ConicPiece(piece.base, fiber)
            if cand.is_empty or (sign and fiber.is_zero()):
                continue
            x = cand.base.relative_interior_point
            xi = (Fraction(sign),)
            res = ssk_definition_test(s, 0, [CotangentPoint(x, xi)])
            if res[0]["member"]:
                kept.append(cand)
    return ConicSubset(1, tuple(kept))
