"""Built-in worked examples, written out by hand.

These are the reference values the test-suite and ``paper-example``
subcommand compare against; none of them is computed by the library.
The JSON files under ``fixtures/`` are generated from these builders by
:func:`write_fixtures`.
"""
import os

from .geometry import ConicPiece, ConicSubset, ConvexCone, ConvexPolyhedron, LocallyClosedPolyhedralSet, PolyhedralSet
from .sheaf import constant_description, example_description, example_set, hyperplane_description


def _poly(n, rows):
    return ConvexPolyhedron(n, tuple(rows))


def example_conormal():
    """``N*_0`` of ``{x >= 0 or y >= 0}``: zero section over the set plus two boundary rays.

    Over ``{y = 0, x <= 0}`` the fiber is ``{xi = 0, eta >= 0}``; over
    ``{x = 0, y <= 0}`` it is ``{eta = 0, xi >= 0}``.
    """
    s = example_set()
    ray_w = _poly(2, [((0, 1), 0), ((0, -1), 0), ((-1, 0), 0)])
    ray_s = _poly(2, [((1, 0), 0), ((-1, 0), 0), ((0, -1), 0)])
    pieces = [ConicPiece(p, ConvexCone.zero(2)) for p in s.pieces]
    pieces.append(ConicPiece(ray_w, ConvexCone(2, ((1, 0), (-1, 0), (0, 1)))))
    pieces.append(ConicPiece(ray_s, ConvexCone(2, ((0, 1), (0, -1), (1, 0)))))
    return ConicSubset(2, tuple(pieces))


def example_quadrant():
    """``{(0, 0; xi, eta) : xi, eta >= 0}``, the part added at ``k = 1``."""
    return ConicSubset(2, (ConicPiece(ConvexPolyhedron.point((0, 0)), ConvexCone.orthant(2)),))


def example_local_types():
    """Expected ``H_{phi >= 0}(k_S)`` ranks at the four regimes of the example set.

    Each entry is ``(name, x, xi, ranks)``: inside the set the constant type
    is seen only by the zero covector, on each boundary ray the inward
    conormal sees the clean boundary in degree 0, and at the corner a covector
    in the open quadrant sees the degree-1 skyscraper type.
    """
    return [
        ("interior", (1, 1), (0, 0), {0: 1}),
        ("interior-covector", (1, 1), (1, 1), {}),
        ("ray-y0", (-1, 0), (0, 1), {0: 1}),
        ("ray-x0", (0, -1), (1, 0), {0: 1}),
        ("corner", (0, 0), (1, 1), {1: 1}),
    ]


def remark_set():
    """``(0, +inf)`` in the line, as closure ``[0, +inf)`` minus ``{0}``."""
    closure = PolyhedralSet.of(_poly(1, [((1,), 0)]))
    return LocallyClosedPolyhedralSet(closure, PolyhedralSet.of(ConvexPolyhedron.point((0,))))


def remark_ss0():
    """``SS_0(k_{(0, inf)}) = {(x; 0) : x >= 0}``."""
    return ConicSubset(1, (ConicPiece(_poly(1, [((1,), 0)]), ConvexCone.zero(1)),))


def line_conormal(n=2):
    """``T*_Y R^n`` for ``Y = {x1 = 0}``; its ideal is generated by ``x1, xi2, ..., xin``."""
    e1 = tuple(int(i == 0) for i in range(n))
    y = _poly(n, [(e1, 0), (tuple(-v for v in e1), 0)])
    walls = []
    for i in range(1, n):
        e = tuple(int(j == i) for j in range(n))
        walls += [e, tuple(-v for v in e)]
    return ConicSubset(n, (ConicPiece(y, ConvexCone(n, tuple(walls))),))


def perversity_instances():
    """``(name, F, dual, codims, expected)`` for the built-in perversity checks."""
    out = []
    kx = constant_description(2)
    out.append(("constant", kx, kx, {"X": 0}, True))
    h0 = hyperplane_description(2, 0)
    out.append(("hypersurface-degree0", h0, h0, {"Y": 1}, False))
    h1 = hyperplane_description(2, 1)
    out.append(("hypersurface-degree1", h1, h1, {"Y": 1}, True))
    return out


def write_fixtures(directory):
    """Write the JSON fixtures into ``directory``; returns the file names."""
    from .serialize import dumps, encode_conic, encode_description, encode_perversity, encode_set

    os.makedirs(directory, exist_ok=True)
    files = {
        "example_set.json": encode_set(example_set()),
        "example_conormal.json": encode_conic(example_conormal()),
        "example_strata.json": encode_description(example_description()),
        "remark_set.json": encode_set(remark_set()),
        "line_conormal.json": encode_conic(line_conormal()),
    }
    for name, f, dual, codims, _ in perversity_instances():
        files[f"perversity_{name.replace('-', '_')}.json"] = encode_perversity(f, dual, codims)
    for name, doc in files.items():
        with open(os.path.join(directory, name), "w", encoding="utf-8") as fh:
            fh.write(dumps(doc))
    return sorted(files)


def fixture_dir():
    return os.path.join(os.path.dirname(__file__), "fixtures")


def resolve_fixture(path):
    """``path`` as given if it exists, else the packaged fixture of the same name."""
    if os.path.exists(path):
        return path
    candidate = os.path.join(fixture_dir(), os.path.basename(path))
    if os.path.exists(candidate):
        return candidate
    return path

