"""Deterministic SVG renderings of height walks and lattice paths.

One lattice unit is 20 px.  Rank-2 plots overlay the convex hull and badge
every hull vertex with its visit count.  Output is plain text SVG with
integer coordinates, stable across runs and platforms.
"""

from __future__ import annotations

from .brown import ConeReport, HeightWalk

UNIT = 20
PAD = 30


def _header(width: int, height: int) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]


def svg_height_walk(walk: HeightWalk, alphabet=None) -> str:
    """The relator's height profile: x advances one unit per letter."""
    hs = walk.heights
    lo, hi = min(hs), max(hs)
    width = 2 * PAD + UNIT * (len(hs) - 1)
    height = 2 * PAD + UNIT * (hi - lo)

    def X(i):
        return PAD + UNIT * i

    def Y(h):
        return PAD + UNIT * (hi - h)

    lines = _header(width, height)
    lines.append(f'<line x1="{X(0)}" y1="{Y(0)}" x2="{X(len(hs) - 1)}" '
                 f'y2="{Y(0)}" stroke="#bbbbbb" stroke-dasharray="4,4"/>')
    pts = " ".join(f"{X(i)},{Y(h)}" for i, h in enumerate(hs))
    lines.append(f'<polyline points="{pts}" fill="none" stroke="black" '
                 'stroke-width="2"/>')
    if alphabet is not None:
        for i, (g, s) in enumerate(walk.relator.letters):
            name = alphabet[g]
            glyph = name if s > 0 else name.upper()
            lines.append(f'<text x="{(X(i) + X(i + 1)) // 2}" '
                         f'y="{height - 8}" font-size="10" '
                         f'text-anchor="middle">{glyph}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def svg_lattice_path(report: ConeReport) -> str:
    """The rank-2 grid path with its convex hull and visit-count badges."""
    pts = list(report.path.points) + [report.path.points[0]]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    lo_x, hi_x = min(xs), max(xs)
    lo_y, hi_y = min(ys), max(ys)
    width = 2 * PAD + UNIT * (hi_x - lo_x)
    height = 2 * PAD + UNIT * (hi_y - lo_y)

    def X(x):
        return PAD + UNIT * (x - lo_x)

    def Y(y):
        return PAD + UNIT * (hi_y - y)

    lines = _header(width, height)
    for x in range(lo_x, hi_x + 1):
        lines.append(f'<line x1="{X(x)}" y1="{Y(lo_y)}" x2="{X(x)}" '
                     f'y2="{Y(hi_y)}" stroke="#eeeeee"/>')
    for y in range(lo_y, hi_y + 1):
        lines.append(f'<line x1="{X(lo_x)}" y1="{Y(y)}" x2="{X(hi_x)}" '
                     f'y2="{Y(y)}" stroke="#eeeeee"/>')
    hull_pts = " ".join(f"{X(x)},{Y(y)}" for x, y in report.hull)
    lines.append(f'<polygon points="{hull_pts}" fill="none" stroke="#cc0000" '
                 'stroke-width="1" stroke-dasharray="6,3"/>')
    path_pts = " ".join(f"{X(x)},{Y(y)}" for x, y in pts)
    lines.append(f'<polyline points="{path_pts}" fill="none" stroke="black" '
                 'stroke-width="2"/>')
    lines.append(f'<circle cx="{X(0)}" cy="{Y(0)}" r="3" fill="black"/>')
    for x, y in report.hull:
        count = report.visit_counts.get((x, y), 0)
        lines.append(f'<circle cx="{X(x)}" cy="{Y(y)}" r="4" fill="none" '
                     'stroke="#cc0000"/>')
        lines.append(f'<text x="{X(x) + 6}" y="{Y(y) - 6}" font-size="10" '
                     f'fill="#cc0000">{count}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
