"""Hand-written SVG phase portraits (no plotting dependency).

Output is a pure function of its inputs: coordinates are printed with fixed
precision and elements are emitted in a fixed order, so identical inputs
give identical bytes.
"""
from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .equilibria import Label, StationaryState
from .flow import nullcline_field
from .response import ResponseFunction

SIZE = 480
MARGIN = 48


def _xy(p1: float, p2: float) -> tuple[float, float]:
    span = SIZE - 2 * MARGIN
    return MARGIN + p1 * span, SIZE - MARGIN - p2 * span


def _polyline(points, cls: str) -> str:
    pts = " ".join("%.2f,%.2f" % _xy(a, b) for a, b in points)
    return f'<polyline class="{cls}" points="{pts}" fill="none"/>'


def phase_portrait(f: ResponseFunction, states: Sequence[StationaryState], title: str = "",
                   resolution: int = 15) -> str:
    """Nullclines, a normalized direction-glyph grid and the stationary
    states (filled = asymptotically stable, hollow = otherwise)."""
    data = nullcline_field(f, resolution=resolution)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        "<style>.axis{stroke:#000;stroke-width:1}.glyph{stroke:#888;stroke-width:1}"
        ".nc1{stroke:#1f5fa8;stroke-width:2}.nc2{stroke:#c0392b;stroke-width:2}"
        "text{font-family:sans-serif;font-size:12px}</style>",
    ]
    x0, y0 = _xy(0, 0)
    x1, y1 = _xy(1, 1)
    out.append(f'<rect class="axis" x="{x0:.2f}" y="{y1:.2f}" width="{x1 - x0:.2f}" '
               f'height="{y0 - y1:.2f}" fill="none"/>')
    out.append(f'<text x="{(x0 + x1) / 2:.2f}" y="{SIZE - 12}" text-anchor="middle">p1</text>')
    out.append(f'<text x="14" y="{(y0 + y1) / 2:.2f}" text-anchor="middle">p2</text>')
    if title:
        out.append(f'<text x="{SIZE / 2:.2f}" y="24" text-anchor="middle">{escape(title)}</text>')

    cell = (SIZE - 2 * MARGIN) / (resolution - 1)
    out.append('<g class="field">')
    for p1, p2, v1, v2 in data["grid"]:
        norm = float(np.hypot(v1, v2))
        if norm < 1e-12:
            continue
        ax, ay = _xy(p1, p2)
        L = 0.4 * cell
        bx, by = ax + L * v1 / norm, ay - L * v2 / norm
        out.append(f'<line class="glyph" x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" y2="{by:.2f}"/>'
                   f'<circle cx="{bx:.2f}" cy="{by:.2f}" r="1.2" fill="#888"/>')
    out.append("</g>")

    out.append(_polyline(data["w_curve"], "nc1 nullcline"))
    out.append(_polyline(data["w_inverse_curve"], "nc2 nullcline"))

    out.append('<g class="states">')
    for s in states:
        if s.label is Label.CONTINUUM:
            continue
        cx, cy = _xy(*s.location.as_tuple())
        fill = "#000" if s.label is Label.STABLE else "#fff"
        kind = "stable" if s.label is Label.STABLE else "unstable"
        out.append(f'<circle class="state {kind}" cx="{cx:.2f}" cy="{cy:.2f}" r="5" '
                   f'fill="{fill}" stroke="#000" stroke-width="1.5"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
