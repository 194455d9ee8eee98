"""Command line front-end: JSON in, JSON out.

Exit codes: 0 on success, 1 on bad input (schema violations name the
field), 2 when a check command reaches a failing verdict.  The check
commands are ``involutivity``, ``perversity`` and ``paper-example``.
Output goes to stdout unless ``--out`` is given.  ``--config FILE`` reads
the same options from a ``run-config/1`` document; flags given on the
command line win.  ``MICROSUPPORT_THREADS`` sets the worker count for
probe grids.
"""
import argparse
import logging
import random
import sys

from . import serialize as ser
from .errors import MicrosupportError, SchemaError
from .worked import resolve_fixture

log = logging.getLogger("microsupport")

COMMANDS = (
    "conormal", "ball-test", "sweep", "poisson", "involutivity",
    "ssk", "localcoh", "perversity", "paper-example", "plot",
)
CHECK_FAILED = 2
BAD_INPUT = 1


class CheckFailed(Exception):
    def __init__(self, doc):
        super().__init__("check failed")
        self.doc = doc


def _load(path, kind=None):
    doc = ser.load_json(resolve_fixture(path))
    value = ser.decode(doc)
    if kind is not None:
        tag = doc["schema"].split("/")[0]
        if tag not in kind:
            raise SchemaError(f"field 'schema': expected one of {', '.join(kind)}, got {tag!r}")
    return value


def _vector(text, name):
    if text is None:
        raise SchemaError(f"field '{name}': required")
    return ser.parse_vector_text(text)


def _closed(s):
    from .geometry import LocallyClosedPolyhedralSet

    if isinstance(s, LocallyClosedPolyhedralSet):
        if s.removed.pieces:
            raise SchemaError("field 'removed': this command needs a closed set")
        return s.closure
    return s


# ---------------------------------------------------------------------------
# commands


def cmd_conormal(a):
    from .normalcone import conormal0

    s = _closed(_load(a.set, ["polyhedral-set"]))
    return ser.encode_conic(conormal0(s))


def cmd_ball_test(a):
    from .normalcone import BallTestParams, ball_test_report, conormal0_halfspace_test

    s = _closed(_load(a.set, ["polyhedral-set"]))
    x, xi = _vector(a.x, "x"), _vector(a.xi, "xi")
    params = _load(a.params, ["ball-test-params"]) if a.params else BallTestParams()
    if a.strict:
        params = BallTestParams(params.t_grid, params.mode, True)
    rep = ball_test_report(s, x, xi, params)
    return {
        "schema": "ball-test-report/1",
        "x": ser.vec(x),
        "xi": ser.vec(xi),
        "verdict": rep["verdict"],
        "reason": rep["reason"],
        "t": None if rep["t"] is None else ser.rat(rep["t"]),
        "halfspace": conormal0_halfspace_test(s, x, xi),
    }


def cmd_sweep(a):
    from .geometry import CotangentPoint
    from .normalcone import conormal0_ball_test, sweep_support_trace

    s = _closed(_load(a.set, ["polyhedral-set"]))
    p = CotangentPoint(_vector(a.x, "x"), _vector(a.xi, "xi"))
    params = _load(a.params, ["sweep-params"]) if a.params else None
    res = sweep_support_trace(s, p, params)
    return {
        "schema": "sweep-report/1",
        "input": ser.encode_point(p),
        "point": ser.encode_point(res.point),
        "c_low": ser.rat(res.c_low),
        "c_high": ser.rat(res.c_high),
        "ball_center": ser.vec(res.ball_center),
        "ball_radius_sq": ser.rat(res.ball_radius_sq),
        "ball_test": conormal0_ball_test(s, res.point.x, res.point.xi),
    }


def _field(text, name, n=None):
    from .symplectic import ScalarField

    if text is None:
        raise SchemaError(f"field '{name}': required")
    try:
        return ScalarField.parse(text, n)
    except SchemaError as exc:
        raise SchemaError(f"field '{name}': {exc}") from None


def cmd_poisson(a):
    from .symplectic import poisson_bracket
    from .symplectic.expr import Const

    f, g = _field(a.f, "f", a.n), _field(a.g, "g", a.n)
    h = poisson_bracket(f, g)
    const = isinstance(h.expr, Const)
    return {
        "schema": "poisson-report/1",
        "f": a.f,
        "g": a.g,
        "n": h.n,
        "bracket": h.expr.prefix(),
        "bracket_infix": str(h.expr),
        "constant": const,
        "value": ser.rat(h.expr.value) if const else None,
    }


def cmd_involutivity(a):
    from .symplectic import weak_involutivity_check

    conic = _load(a.set, ["conic-subset"])
    f, g = _field(a.f, "f", conic.dim), _field(a.g, "g", conic.dim)
    rep = weak_involutivity_check(
        conic, f, g, tol=a.tol, bracket_tol=a.bracket_tol, rng=random.Random(a.seed), count=a.samples
    )
    doc = {"schema": "bracket-report/1", "f": a.f, "g": a.g, "seed": a.seed, **rep.to_json()}
    if rep.verdict == "hypothesis-violated":
        raise SchemaError(f"f or g does not vanish on the set (max {rep.hypothesis_max:.3g})")
    if rep.verdict == "fail":
        raise CheckFailed(doc)
    return doc


def _grid(text):
    lo, hi, count = (text or "-2,2,40").split(",")
    return ser.parse_rat(lo), ser.parse_rat(hi), int(count)


def cmd_ssk(a):
    if a.strata:
        from .sheaf import ssk_from_strata

        d = _load(a.strata, ["stratified-sheaf"])
        return ser.encode_conic(ssk_from_strata(d, a.k))
    if not a.set:
        raise SchemaError("field 'set': either --set or --strata is required")
    from .cohoracle import membership_svg, probe_grid
    from .cohoracle.ssk import run_probes

    s = _load(a.set, ["polyhedral-set"])
    lo, hi, count = _grid(a.grid)
    if s.dim == 1:
        probes = probe_grid(lo, hi, count, covectors=[(1,), (-1,)])
    else:
        probes = probe_grid(lo, hi, count)
    records = run_probes(s, a.k, probes)
    if a.svg:
        xi = _vector(a.xi, "xi") if a.xi else (1,) * s.dim
        with open(a.svg, "w", encoding="utf-8") as fh:
            fh.write(membership_svg(records, xi))
    counts = {"in": 0, "out": 0, "unstable": 0}
    out = []
    for r in records:
        counts[r["label"]] += 1
        out.append({
            "x": ser.vec(r["x"]),
            "xi": ser.vec(r["xi"]),
            "member": r["member"],
            "label": r["label"],
            "ranks": r["ranks"].to_json() if r["ranks"] is not None else None,
        })
    return {"schema": "probe-map/1", "k": a.k, "dim": s.dim, "records": out, "counts": counts}


def cmd_localcoh(a):
    from .cohoracle import local_cohomology

    s = _load(a.set, ["polyhedral-set"])
    x, xi = _vector(a.x, "x"), _vector(a.xi, "xi")
    eps = ser.parse_rat(a.eps) if a.eps else None
    ranks = local_cohomology(s, x, xi, eps=eps)
    return {"schema": "localcoh-report/1", "x": ser.vec(x), "xi": ser.vec(xi), "ranks": ranks.to_json(),
            "euler": ranks.euler}


def cmd_perversity(a):
    from .sheaf import perversity_check

    if not a.instance:
        raise SchemaError("field 'instance': required")
    f, dual, codims = _load(a.instance, ["perversity-instance"])
    ok, rows = perversity_check(f, dual, codims, detail=True)
    doc = {"schema": "perversity-report/1", "perverse": ok, "rows": rows}
    if not ok:
        raise CheckFailed(doc)
    return doc


def _paper_example(which):
    from .cohoracle import local_cohomology, ssk_definition_test
    from .normalcone import conormal0
    from .sheaf import example_description, example_set, ssk_from_strata
    from . import worked

    if which == "conormal":
        got = conormal0(example_set())
        ok = got.same_set(worked.example_conormal())
        return ser.encode_conic(got), {}, ok
    if which == "strata":
        d = example_description()
        n0, n1 = ssk_from_strata(d, 0), ssk_from_strata(d, 1)
        ok0 = n0.same_set(worked.example_conormal())
        ok1 = n1.same_set(worked.example_conormal().union(worked.example_quadrant()))
        return ser.encode_description(d), {"ss0_matches": ok0, "ss1_adds_quadrant": ok1}, ok0 and ok1
    if which == "localcoh":
        rows, ok = [], True
        for name, x, xi, expected in worked.example_local_types():
            ranks = local_cohomology(example_set(), x, xi)
            rows.append({"name": name, "x": ser.vec(x), "xi": ser.vec(xi), "ranks": ranks.to_json()})
            ok = ok and ranks == expected
        return {"rows": rows}, {}, ok
    if which == "remark":
        from .cohoracle import probe_grid
        from .geometry import CotangentPoint

        s = worked.remark_set()
        target = worked.remark_ss0()
        probes = probe_grid(-2, 2, 40, covectors=[(1,), (-1,)])
        recs = ssk_definition_test(s, 0, probes)
        bad = sum(r["member"] != target.contains(CotangentPoint(r["x"], r["xi"])) for r in recs)
        return ser.encode_conic(target), {"probes": len(recs), "disagreements": bad}, bad == 0
    raise SchemaError(f"field 'which': unknown example {which!r} (conormal, strata, localcoh, remark)")


def cmd_paper_example(a):
    which = a.which or "conormal"
    descriptor, details, ok = _paper_example(which)
    doc = {"schema": "paper-example-report/1", "which": which, "descriptor": descriptor,
           "details": details, "self_check": "match" if ok else "mismatch"}
    if not ok:
        raise CheckFailed(doc)
    return doc


def cmd_plot(a):
    from .cohoracle import conic_svg
    from .normalcone import conormal0

    doc = ser.load_json(resolve_fixture(a.set))
    value = ser.decode(doc)
    conic = value if doc["schema"].startswith("conic-subset") else conormal0(_closed(value))
    lo, hi, _ = _grid(a.grid)
    at = [_vector(t, "at") for t in (a.at or [])]
    svg = conic_svg(conic, lo, hi, at)
    if not a.out:
        raise SchemaError("field 'out': plot writes an SVG file")
    with open(a.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    return None


HANDLERS = {
    "conormal": cmd_conormal,
    "ball-test": cmd_ball_test,
    "sweep": cmd_sweep,
    "poisson": cmd_poisson,
    "involutivity": cmd_involutivity,
    "ssk": cmd_ssk,
    "localcoh": cmd_localcoh,
    "perversity": cmd_perversity,
    "paper-example": cmd_paper_example,
    "plot": cmd_plot,
}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run-config/1 JSON file with default options")
    common.add_argument("--out", help="write the output here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="microsupport", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, *opts):
        sp = sub.add_parser(name, parents=[common], help=help_)
        for opt in opts:
            opt(sp)
        return sp

    def set_(sp):
        sp.add_argument("--set", help="polyhedral-set/1 (or conic-subset/1) JSON file")

    def point(sp):
        sp.add_argument("--x", help="base point, e.g. '-1,0'")
        sp.add_argument("--xi", help="covector, e.g. '0,1'")

    def params(sp):
        sp.add_argument("--params", help="parameter JSON file")

    def fg(sp):
        sp.add_argument("--f", help="first field (infix)")
        sp.add_argument("--g", help="second field (infix)")

    add("conormal", "exact 0-conormal cone of a closed set", set_)
    add("ball-test", "exterior-ball test at one point", set_, point, params,
        lambda sp: sp.add_argument("--strict", action="store_true", default=None))
    add("sweep", "exterior-ball witness by the cone sweep", set_, point, params)
    add("poisson", "symbolic Poisson bracket", fg, lambda sp: sp.add_argument("--n", type=int))
    add("involutivity", "sampled weak-involutivity check", set_, fg,
        lambda sp: sp.add_argument("--samples", type=int),
        lambda sp: sp.add_argument("--tol", type=float),
        lambda sp: sp.add_argument("--bracket-tol", dest="bracket_tol", type=float))
    add("ssk", "SS_k from strata, or the definition test on a probe grid", set_,
        lambda sp: sp.add_argument("--strata", help="stratified-sheaf/1 JSON file"),
        lambda sp: sp.add_argument("--k", type=int),
        lambda sp: sp.add_argument("--grid", help="'lo,hi,count' (default -2,2,40)"),
        lambda sp: sp.add_argument("--svg", help="also write a membership heat-map"),
        lambda sp: sp.add_argument("--xi", help="covector shown in the heat-map"))
    add("localcoh", "local cohomology ranks at (x; xi)", set_, point,
        lambda sp: sp.add_argument("--eps", help="window radius (rational)"))
    add("perversity", "perversity criterion on a perversity-instance/1 file",
        lambda sp: sp.add_argument("--instance", help="perversity-instance/1 JSON file"))
    add("paper-example", "built-in worked example with self-check",
        lambda sp: sp.add_argument("--which", choices=["conormal", "strata", "localcoh", "remark"]))
    add("plot", "SVG of a planar conic set with fiber fans", set_,
        lambda sp: sp.add_argument("--at", action="append", help="base point for a fan (repeatable)"),
        lambda sp: sp.add_argument("--grid", help="'lo,hi,count' window (default -2,2,40)"))
    return p


DEFAULTS = {"samples": 500, "tol": 1e-9, "bracket_tol": None, "k": 0, "strict": False}


def _apply_config(args, parser):
    if not args.config:
        for key, val in DEFAULTS.items():
            if getattr(args, key, None) is None and hasattr(args, key):
                setattr(args, key, val)
        return args
    doc = dict(ser.load_json(args.config))
    doc.setdefault("schema", "run-config/1")
    ser.validate(doc, "run-config")
    if doc["command"] != args.command:
        raise SchemaError(f"field 'command': config is for {doc['command']!r}, not {args.command!r}")
    explicit = set()
    for tok in args._argv:
        if tok.startswith("--"):
            explicit.add(tok[2:].split("=")[0].replace("-", "_"))
    for key, val in doc.items():
        if key in ("schema", "command"):
            continue
        if not hasattr(args, key):
            raise SchemaError(f"field '{key}': not an option of {args.command}")
        if key not in explicit:
            setattr(args, key, val)
    for key, val in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, val)
    return args


VALUE_OPTIONS = {"--x", "--xi", "--at", "--grid", "--eps"}


def _glue_values(argv):
    """``--x -1,0`` -> ``--x=-1,0`` so that negative vectors are not taken for flags."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in VALUE_OPTIONS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def run(argv=None):
    """Run the CLI; returns the exit code."""
    parser = build_parser()
    argv = _glue_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else BAD_INPUT
    args._argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    code = 0
    try:
        args = _apply_config(args, parser)
        doc = HANDLERS[args.command](args)
    except CheckFailed as exc:
        doc, code = exc.doc, CHECK_FAILED
    except (MicrosupportError, OSError, ValueError) as exc:
        tag = getattr(exc, "code", "error")
        print(f"error [{tag}]: {exc}", file=sys.stderr)
        return BAD_INPUT
    if doc is not None:
        ser.validate(doc)
        text = ser.dumps(doc)
        if args.out and args.command != "plot":
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
