"""SVG 1.1 rendering of layouts.

Output is a pure function of the layout and instance: coordinates are
printed with a fixed number of decimals and no timestamps are written.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .geometry import Piece, transform_vertex
from .instance import ValidationError
from .report import Layout

PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)


def _f(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def layout_svg(layout: Layout, pieces: Sequence[Piece], strip_width: float,
               px_per_unit: float = 20.0, margin: float = 10.0) -> str:
    if not layout.placements:
        raise ValidationError("layout has no placed pieces")
    if len(layout.placements) != len(pieces):
        raise ValidationError(
            f"layout places {len(layout.placements)} pieces, instance has {len(pieces)}"
        )
    e = float(strip_width)
    polys = []
    xmax = layout.length
    for i, (pc, pl) in enumerate(zip(pieces, layout.placements)):
        color = PALETTE[i % len(PALETTE)]
        for part in pc.parts:
            pts = [transform_vertex(v, pl) for v in part.vertices]
            xmax = max(xmax, max(p.x for p in pts))
            # flip y so the strip bottom is at the bottom of the picture
            coords = " ".join(f"{_f(p.x)},{_f(e - p.y)}" for p in pts)
            polys.append(
                f'  <polygon points="{coords}" fill="{color}" fill-opacity="0.5" '
                f'stroke="#000000" stroke-width="0.02" data-piece="{pc.id}"/>'
            )
    width = xmax * 1.05 + 1.0
    k = px_per_unit
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_f(width * k + 2 * margin)}" height="{_f(e * k + 2 * margin)}" '
        f'viewBox="{_f(-margin / k)} {_f(-margin / k)} {_f(width + 2 * margin / k)} {_f(e + 2 * margin / k)}">',
        f"  <title>{layout.instance or 'layout'} length={_f(layout.length)}</title>",
        f'  <rect x="0" y="0" width="{_f(width)}" height="{_f(e)}" fill="none" '
        f'stroke="#000000" stroke-width="0.04"/>',
        *polys,
        f'  <line x1="{_f(layout.length)}" y1="0" x2="{_f(layout.length)}" y2="{_f(e)}" '
        f'stroke="#d00000" stroke-width="0.04" stroke-dasharray="0.1,0.1"/>',
        "</svg>",
    ]
    return "\n".join(out) + "\n"


def render_svg(layout: Layout, pieces: Sequence[Piece], strip_width: float, path) -> None:
    text = layout_svg(layout, pieces, strip_width)
    Path(path).write_text(text, encoding="utf-8")
