"""SVG drawings of quotient complexes of rank 1 (as a circle) and rank 2."""
from __future__ import annotations

import math
from fractions import Fraction
from xml.sax.saxutils import escape

from .arrangement import QuotientComplex
from .errors import InputError
from .resolution import monomial_string

SIZE = 640
MARGIN = 60


def _header(width: int, height: int) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"7\" "
        "markerHeight=\"7\" orient=\"auto-start-reverse\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#333\"/></marker></defs>",
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]


def _text(x: float, y: float, s: str, **attrs) -> str:
    extra = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return f'<text x="{x:.2f}" y="{y:.2f}"{extra}>{escape(s)}</text>'


def render_svg(qc: QuotientComplex, path=None) -> str:
    """Draw the quotient; write it to ``path`` when given and return the SVG text."""
    m = qc.spec.m
    if m == 1:
        svg = _render_circle(qc)
    elif m == 2:
        svg = _render_plane(qc)
    else:
        raise InputError(f"rendering supports lattice rank 1 or 2, not {m}")
    if path is not None:
        with open(path, "w") as fh:
            fh.write(svg)
    return svg


def _render_circle(qc: QuotientComplex) -> str:
    n = qc.spec.n
    period = Fraction(abs(qc.translations.basis[0, 0]))
    cx = cy = SIZE / 2
    R = SIZE / 2 - MARGIN
    cells = qc.window.cells
    points = qc.window.vertex_points

    def angle(t):
        return 2 * math.pi * float((t + period / 2) / period) - math.pi / 2

    def at(theta, r=R):
        return cx + r * math.cos(theta), cy + r * math.sin(theta)

    out = _header(SIZE, SIZE)
    out.append(f'<circle cx="{cx}" cy="{cy}" r="{R}" fill="none" stroke="#ccc" stroke-dasharray="4 4"/>')
    for e in qc.cells[1]:
        ends = sorted(points[v][0] for v in cells[e.key].vertices)
        a0, a1 = angle(ends[0]), angle(ends[-1])
        if a1 <= a0:
            a1 += 2 * math.pi
        x0, y0 = at(a0)
        x1, y1 = at(a1)
        large = 1 if a1 - a0 > math.pi else 0
        out.append(f'<path d="M{x0:.2f},{y0:.2f} A{R},{R} 0 {large} 1 {x1:.2f},{y1:.2f}" '
                   'fill="none" stroke="#333" stroke-width="2" marker-end="url(#arrow)"/>')
        lx, ly = at((a0 + a1) / 2, R + 24)
        out.append(_text(lx, ly, monomial_string(e.label, n), text_anchor="middle", fill="#555"))
    for v in qc.cells[0]:
        x, y = at(angle(points[v.key][0]))
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="5" class="vertex" fill="#1f4e99"/>')
        lx, ly = at(angle(points[v.key][0]), R - 22)
        out.append(_text(lx, ly, monomial_string(v.label, n), text_anchor="middle", fill="#1f4e99"))
    out.append(_text(10, 20, f"f-vector {tuple(qc.f_vector())}"))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _render_plane(qc: QuotientComplex) -> str:
    spec = qc.spec
    n = spec.n
    cells = qc.window.cells
    points = qc.window.vertex_points
    reps = [c for dim_cells in qc.cells for c in dim_cells]
    coords = [points[v] for c in reps for v in cells[c.key].vertices]
    xs = [float(p[0]) for p in coords]
    ys = [float(p[1]) for p in coords]
    lo_x, hi_x, lo_y, hi_y = min(xs), max(xs), min(ys), max(ys)
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-9)
    scale = (SIZE - 2 * MARGIN) / span

    def px(p):
        return MARGIN + (float(p[0]) - lo_x) * scale, SIZE - MARGIN - (float(p[1]) - lo_y) * scale

    out = _header(SIZE, SIZE)
    # hyperplane traces p_i = k across the bounding box
    for i in spec.families:
        a, b = spec.basis.row(i)
        eps = float(spec.epsilon[i])
        vals = [a * x + b * y + eps for x in (lo_x, hi_x) for y in (lo_y, hi_y)]
        for k in range(math.floor(min(vals)), math.ceil(max(vals)) + 1):
            seg = _clip_line(a, b, k - eps, lo_x, hi_x, lo_y, hi_y)
            if seg:
                (x0, y0), (x1, y1) = px(seg[0]), px(seg[1])
                out.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y1:.2f}" '
                           'stroke="#bbb" stroke-dasharray="3 3"/>')
    # fundamental domain C·[-1/2, 1/2)^2
    C = qc.translations.basis
    corners = []
    for s0, s1 in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
        corners.append(px((Fraction(s0 * C[0, 0] + s1 * C[0, 1], 2), Fraction(s0 * C[1, 0] + s1 * C[1, 1], 2))))
    out.append('<polygon points="' + " ".join(f"{x:.2f},{y:.2f}" for x, y in corners)
               + '" fill="none" stroke="#c33" stroke-width="1.5"/>')
    for f in qc.cells[2]:
        poly = _ordered([points[v] for v in cells[f.key].vertices], f.centroid)
        out.append('<polygon points="' + " ".join("%.2f,%.2f" % px(p) for p in poly)
                   + '" fill="#e8eefa" stroke="none" fill-opacity="0.7"/>')
        x, y = px(f.centroid)
        out.append(_text(x, y, monomial_string(f.label, n), text_anchor="middle", fill="#777", font_size="10"))
    for e in qc.cells[1]:
        ends = [points[v] for v in cells[e.key].vertices]
        tangent = cells[e.key].tangent[0]
        ends.sort(key=lambda p: sum(a * b for a, b in zip(p, tangent)))
        (x0, y0), (x1, y1) = px(ends[0]), px(ends[-1])
        out.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y1:.2f}" '
                   'stroke="#333" stroke-width="2" marker-end="url(#arrow)"/>')
        for inc in qc.boundary(1, e.index):
            facet = qc.cells[0][inc.facet]
            target = tuple(a + b for a, b in zip(facet.centroid, inc.shift))
            sx, sy = px(target)
            mx, my = (x0 + x1) / 2, (y0 + y1) / 2
            out.append(_text(mx + 0.8 * (sx - mx), my + 0.8 * (sy - my) - 4,
                             "+" if inc.sign > 0 else "−", fill="#a00", font_size="11"))
    for v in qc.cells[0]:
        x, y = px(v.centroid)
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="4.5" class="vertex" fill="#1f4e99"/>')
        out.append(_text(x + 6, y - 6, monomial_string(v.label, n), fill="#1f4e99"))
    out.append(_text(10, 20, f"f-vector {tuple(qc.f_vector())}"))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _ordered(pts, centre):
    return sorted(pts, key=lambda p: math.atan2(float(p[1] - centre[1]), float(p[0] - centre[0])))


def _clip_line(a, b, c, x0, x1, y0, y1):
    """Segment of a·x + b·y = c inside the box, or None."""
    hits = []
    if b:
        for x in (x0, x1):
            y = (c - a * x) / b
            if y0 - 1e-9 <= y <= y1 + 1e-9:
                hits.append((x, y))
    if a:
        for y in (y0, y1):
            x = (c - b * y) / a
            if x0 - 1e-9 <= x <= x1 + 1e-9:
                hits.append((x, y))
    hits = sorted(set((round(x, 9), round(y, 9)) for x, y in hits))
    if len(hits) < 2:
        return None
    return hits[0], hits[-1]
