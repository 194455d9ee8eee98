"""JSON encoding of the library's values.

Rationals travel as strings ``"p/q"`` (or ``"p"``); integers are accepted on
input.  Every document carries a ``"schema"`` tag such as
``"conic-subset/1"`` and is validated against the matching file under
``schemas/`` before it is decoded.  Encoding is deterministic: the same
value always gives the same bytes under :func:`dumps`.
"""
import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from .errors import SchemaError
from .geometry import (
    ConicPiece,
    ConicSubset,
    ConvexCone,
    ConvexPolyhedron,
    CotangentPoint,
    LocallyClosedPolyhedralSet,
    PolyhedralSet,
)

SCHEMA_BASE = "https://microsupport.invalid/schemas/"


# ---------------------------------------------------------------------------
# schema registry


@lru_cache(maxsize=None)
def _registry():
    resources_ = []
    root = resources.files("microsupport") / "schemas"
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".schema.json"):
            contents = json.loads(entry.read_text())
            resources_.append((contents["$id"], Resource.from_contents(contents)))
    return Registry().with_resources(resources_)


@lru_cache(maxsize=None)
def schema(name):
    """The published schema document for a tag name such as ``"conic-subset"``."""
    res = _registry().get(SCHEMA_BASE + f"{name}.schema.json")
    if res is None:
        raise SchemaError(f"unknown schema {name!r}")
    return res.contents


def schema_names():
    return sorted(
        uri[len(SCHEMA_BASE):-len(".schema.json")]
        for uri in _registry()
        if uri.startswith(SCHEMA_BASE) and not uri.endswith("common.schema.json")
    )


def validate(doc, name=None):
    """Validate ``doc`` against its schema; the error names the offending field."""
    if not isinstance(doc, dict):
        raise SchemaError("a JSON object is expected at the top level")
    if name is None:
        tag = doc.get("schema")
        if not isinstance(tag, str) or "/" not in tag:
            raise SchemaError("field 'schema': missing or not of the form '<name>/<version>'")
        name = tag.split("/")[0]
    validator = Draft202012Validator(schema(name), registry=_registry())
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise SchemaError(f"field '{path}': {err.message}")
    return doc


# ---------------------------------------------------------------------------
# scalars and vectors


def rat(v):
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_rat(v):
    if isinstance(v, bool):
        raise SchemaError(f"not a rational: {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise SchemaError(f"not a rational: {v!r}") from None
    raise SchemaError(f"not a rational: {v!r}")


def vec(v):
    return [rat(x) for x in v]


def parse_vec(v):
    return tuple(parse_rat(x) for x in v)


def parse_vector_text(text):
    """``"1,-1/2"`` -> ``(1, -1/2)``; spaces and semicolons are tolerated."""
    parts = [p for p in text.replace(";", ",").replace(" ", ",").split(",") if p]
    if not parts:
        raise SchemaError(f"empty vector {text!r}")
    return tuple(parse_rat(p) for p in parts)


# ---------------------------------------------------------------------------
# geometry


def polyhedron_rows(p):
    return [vec(a) + [rat(b)] for a, b in p.halfspaces]


def parse_polyhedron(rows, n):
    out = []
    for row in rows:
        if len(row) != n + 1:
            raise SchemaError(f"half-space row {row!r} should have {n + 1} entries")
        vals = parse_vec(row)
        out.append((vals[:-1], vals[-1]))
    return ConvexPolyhedron(n, tuple(out))


def cone_rows(c):
    return [vec(a) for a in c.halfspaces]


def parse_cone(rows, n):
    for row in rows:
        if len(row) != n:
            raise SchemaError(f"fiber wall {row!r} should have {n} entries")
    return ConvexCone(n, tuple(parse_vec(r) for r in rows))


def encode_set(s):
    """``PolyhedralSet`` or ``LocallyClosedPolyhedralSet`` -> document."""
    if isinstance(s, LocallyClosedPolyhedralSet):
        doc = encode_set(s.closure)
        if s.removed.pieces:
            doc["removed"] = [polyhedron_rows(p) for p in s.removed.pieces]
        return doc
    return {"schema": "polyhedral-set/1", "dim": s.dim, "pieces": [polyhedron_rows(p) for p in s.pieces]}


def decode_set(doc):
    """Document -> ``PolyhedralSet`` (or locally closed when ``removed`` is present)."""
    validate(doc, "polyhedral-set")
    n = doc["dim"]
    closed = PolyhedralSet(n, tuple(parse_polyhedron(p, n) for p in doc["pieces"]))
    if doc.get("removed"):
        removed = PolyhedralSet(n, tuple(parse_polyhedron(p, n) for p in doc["removed"]))
        return LocallyClosedPolyhedralSet(closed, removed)
    return closed


def encode_piece(p):
    return {"base": polyhedron_rows(p.base), "fiber": cone_rows(p.fiber)}


def decode_piece(d, n):
    return ConicPiece(parse_polyhedron(d["base"], n), parse_cone(d["fiber"], n))


def encode_conic(c):
    return {"schema": "conic-subset/1", "dim": c.dim, "pieces": [encode_piece(p) for p in c.pieces]}


def decode_conic(doc):
    validate(doc, "conic-subset")
    n = doc["dim"]
    return ConicSubset(n, tuple(decode_piece(p, n) for p in doc["pieces"]))


def encode_point(p):
    return {"x": vec(p.x), "xi": vec(p.xi)}


def decode_point(d):
    return CotangentPoint(parse_vec(d["x"]), parse_vec(d["xi"]))


# ---------------------------------------------------------------------------
# sheaf descriptions


def encode_description(d):
    strata = []
    for s in d.strata:
        item = {
            "id": s.id,
            "stratum": {
                "closure": [polyhedron_rows(p) for p in s.stratum.closure.pieces],
                "removed": [polyhedron_rows(p) for p in s.stratum.removed.pieces],
            },
            "lambda": [encode_piece(p) for p in s.lam.pieces],
            "degrees": sorted(s.degrees),
        }
        if s.rank_by_degree:
            item["rank_by_degree"] = {str(k): v for k, v in sorted(s.rank_by_degree.items())}
        strata.append(item)
    return {"schema": "stratified-sheaf/1", "dim": d.n, "covers_ss": d.covers_ss, "strata": strata}


def decode_description(doc):
    from .sheaf import StratifiedSheafDescription, StratumDatum

    validate(doc, "stratified-sheaf")
    n = doc["dim"]
    strata = []
    for item in doc["strata"]:
        closure = PolyhedralSet(n, tuple(parse_polyhedron(p, n) for p in item["stratum"]["closure"]))
        removed = PolyhedralSet(n, tuple(parse_polyhedron(p, n) for p in item["stratum"].get("removed", [])))
        lam = ConicSubset(n, tuple(decode_piece(p, n) for p in item["lambda"]))
        ranks = item.get("rank_by_degree")
        strata.append(
            StratumDatum(
                item["id"],
                LocallyClosedPolyhedralSet(closure, removed),
                lam,
                frozenset(item["degrees"]),
                {int(k): v for k, v in ranks.items()} if ranks else None,
            )
        )
    return StratifiedSheafDescription(n, tuple(strata), doc.get("covers_ss", True))


def decode_perversity(doc):
    validate(doc, "perversity-instance")
    sheaf = decode_description(doc["sheaf"])
    dual = decode_description(doc["dual"])
    return sheaf, dual, dict(doc["codims"])


def encode_perversity(sheaf, dual, codims):
    return {
        "schema": "perversity-instance/1",
        "sheaf": encode_description(sheaf),
        "dual": encode_description(dual),
        "codims": {k: int(v) for k, v in sorted(codims.items())},
    }


# ---------------------------------------------------------------------------
# parameters


def encode_ball_params(p):
    return {"schema": "ball-test-params/1", "t_grid": vec(p.t_grid), "mode": p.mode, "strict": p.strict}


def decode_ball_params(doc):
    from .normalcone import BallTestParams

    validate(doc, "ball-test-params")
    kw = {}
    if "t_grid" in doc:
        kw["t_grid"] = parse_vec(doc["t_grid"])
    for key in ("mode", "strict"):
        if key in doc:
            kw[key] = doc[key]
    return BallTestParams(**kw)


def encode_sweep_params(p):
    return {
        "schema": "sweep-params/1",
        "gamma": cone_rows(p.gamma),
        "epsilon": rat(p.epsilon),
        "v": vec(p.v),
        "delta": rat(p.delta),
        "rho": rat(p.rho),
    }


def decode_sweep_params(doc):
    from .normalcone import SweepParams

    validate(doc, "sweep-params")
    v = parse_vec(doc["v"])
    return SweepParams(
        parse_cone(doc["gamma"], len(v)), parse_rat(doc["epsilon"]), v, parse_rat(doc["delta"]), parse_rat(doc["rho"])
    )


# ---------------------------------------------------------------------------
# generic entry points

_DECODERS = {
    "polyhedral-set": decode_set,
    "conic-subset": decode_conic,
    "stratified-sheaf": decode_description,
    "perversity-instance": decode_perversity,
    "ball-test-params": decode_ball_params,
    "sweep-params": decode_sweep_params,
}


def decode(doc):
    """Decode any input document by its ``schema`` tag."""
    validate(doc)
    name = doc["schema"].split("/")[0]
    if name not in _DECODERS:
        raise SchemaError(f"field 'schema': {doc['schema']!r} is an output format, not an input")
    return _DECODERS[name](doc)


def dumps(doc):
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
