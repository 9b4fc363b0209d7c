"""Deterministic SVG pictures of planar arrangements."""

from __future__ import annotations

from .geometry import Arrangement, vertices
from .rdbasis import LINEAR

SIZE = 480


def _clip(poly, a0, a1, a2):
    """Sutherland-Hodgman clip of a polygon to ``a0 + a1 x + a2 y >= 0``."""
    out = []
    n = len(poly)
    for k in range(n):
        p, q = poly[k], poly[(k + 1) % n]
        vp = a0 + a1 * p[0] + a2 * p[1]
        vq = a0 + a1 * q[0] + a2 * q[1]
        if vp >= 0:
            out.append(p)
        if (vp >= 0) != (vq >= 0):
            s = vp / (vp - vq)
            out.append((p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])))
    return out


def _box(A: Arrangement, extra_points=()):
    pts = [tuple(float(c) for c in v) for v in vertices(A)] + list(extra_points)
    if not pts:
        pts = [(0.0, 0.0)]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    pad = 0.35 * span
    return min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad


def _region(A, sign, box, extra=()):
    x0, x1, y0, y1 = box
    poly = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    for h, s in zip(A.hyperplanes, sign):
        c = [float(v) * s for v in h.coeffs]
        poly = _clip(poly, *c)
        if not poly:
            break
    for c in extra:
        poly = _clip(poly, *c)
    return poly


def plot_svg(A: Arrangement, census, basis=None, path=None) -> str:
    """Lines of the arrangement, bounded chambers filled, truncated chambers hatched.

    Returns the SVG text and writes it to ``path`` when given.
    """
    if A.dim != 2:
        raise ValueError("plot_svg needs a planar arrangement, got dimension %d" % A.dim)
    extra_pts = []
    if basis is not None and basis.phase.kind == LINEAR:
        # include where the truncation line meets each hyperplane
        c = basis.phase.f.coeffs
        for h in A.hyperplanes:
            det = h.coeffs[1] * c[2] - h.coeffs[2] * c[1]
            if det != 0:
                rhs = (-h.coeffs[0], basis.R - c[0])
                extra_pts.append((float((rhs[0] * c[2] - h.coeffs[2] * rhs[1]) / det),
                                  float((h.coeffs[1] * rhs[1] - rhs[0] * c[1]) / det)))
    box = _box(A, extra_pts)
    x0, x1, y0, y1 = box
    sx = SIZE / (x1 - x0)
    sy = SIZE / (y1 - y0)

    def tx(p):
        return "%.3f,%.3f" % ((p[0] - x0) * sx, (y1 - p[1]) * sy)

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" viewBox="0 0 %d %d">' % (SIZE, SIZE, SIZE, SIZE),
        "<defs><pattern id=\"hatch\" width=\"8\" height=\"8\" patternUnits=\"userSpaceOnUse\" "
        "patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"#c0392b\" "
        "stroke-width=\"2\"/></pattern></defs>",
        '<rect width="%d" height="%d" fill="white"/>' % (SIZE, SIZE),
    ]
    for ch in census.chambers:
        if ch.bounded:
            poly = _region(A, ch.sign, box)
            parts.append('<polygon class="bounded" points="%s" fill="#5dade2" fill-opacity="0.6"/>'
                         % " ".join(tx(p) for p in poly))
    phase_line = None
    if basis is not None and basis.phase.kind == LINEAR:
        c = [float(v) for v in basis.phase.f.coeffs]
        R = float(basis.R)
        trunc = (R - c[0], -c[1], -c[2])
        for t in basis.truncated:
            poly = _region(A, t.chamber.sign, box, (trunc,))
            if len(poly) >= 3:
                parts.append('<polygon class="truncated" points="%s" fill="url(#hatch)" stroke="#c0392b"/>'
                             % " ".join(tx(p) for p in poly))
        phase_line = (c[0] - R, c[1], c[2])
    for h in A.hyperplanes:
        seg = _line_segment([float(v) for v in h.coeffs], box)
        if seg:
            parts.append('<line class="hyperplane" x1="%.3f" y1="%.3f" x2="%.3f" y2="%.3f" stroke="black" stroke-width="1.5"/>'
                         % _seg_coords(seg, box, sx, sy))
    if phase_line is not None:
        seg = _line_segment(list(phase_line), box)
        if seg:
            parts.append('<line class="phase" x1="%.3f" y1="%.3f" x2="%.3f" y2="%.3f" stroke="#c0392b" '
                         'stroke-dasharray="6,4" stroke-width="1.5"/>' % _seg_coords(seg, box, sx, sy))
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _seg_coords(seg, box, sx, sy):
    x0, x1, y0, y1 = box
    (p, q) = seg
    return ((p[0] - x0) * sx, (y1 - p[1]) * sy, (q[0] - x0) * sx, (y1 - q[1]) * sy)


def _line_segment(c, box):
    """Intersection of ``c0 + c1 x + c2 y = 0`` with the box."""
    x0, x1, y0, y1 = box
    pts = []
    if c[2] != 0:
        for x in (x0, x1):
            y = -(c[0] + c[1] * x) / c[2]
            if y0 <= y <= y1:
                pts.append((x, y))
    if c[1] != 0:
        for y in (y0, y1):
            x = -(c[0] + c[2] * y) / c[1]
            if x0 <= x <= x1:
                pts.append((x, y))
    pts = sorted(set(pts))
    if len(pts) < 2:
        return None
    return pts[0], pts[-1]
