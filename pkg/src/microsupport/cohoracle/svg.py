"""A small SVG heat-map of probe membership over the base, for one covector."""
from xml.sax.saxutils import escape


def membership_svg(records, xi, size=400, title=None):
    """Squares coloured by label for the probes whose covector equals ``xi``."""
    pts = [r for r in records if tuple(r["xi"]) == tuple(xi)]
    if not pts:
        return '<svg xmlns="http://www.w3.org/2000/svg" width="10" height="10"/>'
    xs = sorted({float(r["x"][0]) for r in pts})
    ys = sorted({float(r["x"][1]) for r in pts}) if len(pts[0]["x"]) > 1 else [0.0]
    cw, ch = size / len(xs), size / len(ys)
    colour = {"in": "#c0392b", "out": "#f4f4f4", "unstable": "#f1c40f"}
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size + 20}">']
    label = title or f"xi = ({', '.join(str(v) for v in xi)})"
    parts.append(f'<text x="4" y="14" font-size="12">{escape(label)}</text>')
    xi_index = {v: i for i, v in enumerate(xs)}
    yi_index = {v: i for i, v in enumerate(ys)}
    for r in pts:
        i = xi_index[float(r["x"][0])]
        j = yi_index[float(r["x"][1])] if len(r["x"]) > 1 else 0
        y = 20 + (len(ys) - 1 - j) * ch
        parts.append(
            f'<rect x="{i * cw:.2f}" y="{y:.2f}" width="{cw:.2f}" height="{ch:.2f}" fill="{colour[r["label"]]}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def _polygon(poly):
    """Vertices of a bounded planar polyhedron in counter-clockwise order."""
    from math import atan2

    pts = poly.vertices()
    if not pts:
        return []
    cx = sum(float(p[0]) for p in pts) / len(pts)
    cy = sum(float(p[1]) for p in pts) / len(pts)
    return sorted(((float(p[0]), float(p[1])) for p in pts), key=lambda p: atan2(p[1] - cy, p[0] - cx))


def conic_svg(conic, lo=-2, hi=2, at=(), size=400, title=None):
    """Base-space slice of a planar conic subset with fiber fans at chosen points.

    Base pieces are clipped to the square ``[lo, hi]^2`` and shaded; at each
    point of ``at`` the generators of every fiber through it are drawn as
    arrows, with the wedge filled when a fiber is a pointed planar cone.
    """
    from ..geometry import ConvexPolyhedron

    if conic.dim != 2:
        raise ValueError("plots are drawn for planar sets only")
    lo, hi = float(lo), float(hi)
    scale = size / (hi - lo)

    def sx(x):
        return (x - lo) * scale

    def sy(y):
        return 20 + (hi - y) * scale

    box = ConvexPolyhedron.box((lo, lo), (hi, hi))
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size + 20}">']
    parts.append(f'<text x="4" y="14" font-size="12">{escape(title or "base slice and fiber fans")}</text>')
    parts.append(f'<rect x="0" y="20" width="{size}" height="{size}" fill="#ffffff" stroke="#999999"/>')
    seen = set()
    for piece in conic.nonempty_pieces:
        clipped = piece.base.intersect(box)
        if clipped.is_empty:
            continue
        pts = _polygon(clipped)
        key = tuple(pts)
        if key in seen:
            continue
        seen.add(key)
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        zero = piece.fiber.is_zero()
        fill = "#d6e4f0" if zero else "none"
        stroke = "#2c3e50" if zero else "#c0392b"
        if len(pts) == 1:
            parts.append(f'<circle cx="{sx(pts[0][0]):.2f}" cy="{sy(pts[0][1]):.2f}" r="3" fill="{stroke}"/>')
        else:
            parts.append(f'<polygon points="{coords}" fill="{fill}" fill-opacity="0.7" stroke="{stroke}"/>')
    arm = 0.12 * (hi - lo)
    for p in at:
        px, py = float(p[0]), float(p[1])
        parts.append(f'<circle cx="{sx(px):.2f}" cy="{sy(py):.2f}" r="3" fill="#000000"/>')
        for fiber in conic.fiber_at(p):
            gens = []
            for g in fiber.generators():
                nrm = (float(g[0]) ** 2 + float(g[1]) ** 2) ** 0.5
                if nrm:
                    gens.append((float(g[0]) / nrm, float(g[1]) / nrm))
            if len(gens) == 2 and abs(gens[0][0] + gens[1][0]) + abs(gens[0][1] + gens[1][1]) > 1e-12:
                wedge = [(px, py)] + [(px + arm * u, py + arm * v) for u, v in gens]
                coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in wedge)
                parts.append(f'<polygon points="{coords}" fill="#f5b7b1" fill-opacity="0.6"/>')
            for u, v in gens:
                parts.append(
                    f'<line x1="{sx(px):.2f}" y1="{sy(py):.2f}" x2="{sx(px + arm * u):.2f}" '
                    f'y2="{sy(py + arm * v):.2f}" stroke="#c0392b" stroke-width="2"/>'
                )
    parts.append("</svg>")
    return "\n".join(parts)
