"""SVG and CSV emission for fields and contours.

Output is byte-deterministic for identical inputs: no timestamps, fixed
float formatting (SVG coordinates at 1/100 px, CSV values at full repr()
precision).  Every file starts with a provenance comment supplied by the
caller (tool version + invocation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contour import ContourSet, ScalarField

DEFAULT_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


@dataclass(frozen=True)
class SvgStyle:
    size: int = 800
    margin: float = 60.0
    stroke_width: float = 2.0
    shade_fill: str = "#bcd8f0"
    max_shade_cells: int = 96  # per axis; denser fields are strided down


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def emit_svg(path, layers, bounds, field: ScalarField | None = None,
             style: SvgStyle | None = None, provenance: str = "",
             title: str = "") -> None:
    """Write contour layers as an SVG plot.

    ``layers`` is a list of (ContourSet, stroke-color) pairs; pass colors
    from DEFAULT_PALETTE or any CSS color.  If ``field`` is given, grid
    cells whose four corners are all inside are shaded first.
    """
    st = style or SvgStyle()
    (xlo, xhi), (ylo, yhi) = bounds
    span = st.size - 2 * st.margin

    def to_px(x, y):
        px = st.margin + (x - xlo) / (xhi - xlo) * span
        py = st.size - st.margin - (y - ylo) / (yhi - ylo) * span
        return px, py

    parts = ['<?xml version="1.0" encoding="UTF-8"?>']
    if provenance:
        parts.append(f"<!-- {provenance} -->")
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{st.size}" height="{st.size}" '
        f'viewBox="0 0 {st.size} {st.size}">'
    )
    parts.append(f'<rect width="{st.size}" height="{st.size}" fill="white"/>')

    if field is not None:
        parts.append(_shading(field, to_px, st))

    # frame and corner labels
    x0, y0 = to_px(xlo, ylo)
    x1, y1 = to_px(xhi, yhi)
    parts.append(
        f'<rect x="{_fmt(min(x0, x1))}" y="{_fmt(min(y0, y1))}" '
        f'width="{_fmt(abs(x1 - x0))}" height="{_fmt(abs(y1 - y0))}" '
        f'fill="none" stroke="#444" stroke-width="1"/>'
    )
    parts.append(f'<text x="{_fmt(x0)}" y="{_fmt(y0 + 20)}" font-size="14">{xlo:g}</text>')
    parts.append(f'<text x="{_fmt(x1 - 10)}" y="{_fmt(y0 + 20)}" font-size="14">{xhi:g}</text>')
    parts.append(f'<text x="{_fmt(x0 - 45)}" y="{_fmt(y0)}" font-size="14">{ylo:g}</text>')
    parts.append(f'<text x="{_fmt(x0 - 45)}" y="{_fmt(y1 + 5)}" font-size="14">{yhi:g}</text>')
    if title:
        parts.append(f'<text x="{_fmt(st.size / 2)}" y="30" font-size="18" '
                     f'text-anchor="middle">{title}</text>')

    for contours, color in layers:
        for line in contours.polylines:
            cmds = []
            for k, (x, y) in enumerate(line.points):
                px, py = to_px(x, y)
                cmds.append(f"{'M' if k == 0 else 'L'} {_fmt(px)} {_fmt(py)}")
            if line.closed:
                cmds.append("Z")
            parts.append(
                f'<path d="{" ".join(cmds)}" fill="none" stroke="{color}" '
                f'stroke-width="{st.stroke_width:g}"/>'
            )

    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def _shading(field: ScalarField, to_px, st: SvgStyle) -> str:
    nx, ny = field.resolution
    sx = max(1, math.ceil((nx - 1) / st.max_shade_cells))
    sy = max(1, math.ceil((ny - 1) / st.max_shade_cells))
    ix = np.arange(0, nx, sx)
    iy = np.arange(0, ny, sy)
    if ix[-1] != nx - 1:
        ix = np.append(ix, nx - 1)
    if iy[-1] != ny - 1:
        iy = np.append(iy, ny - 1)
    sub = field.values[np.ix_(ix, iy)] >= 0.0
    xs = field.axis(0)[ix]
    ys = field.axis(1)[iy]
    rects = [f'<g fill="{st.shade_fill}" stroke="none">']
    full = sub[:-1, :-1] & sub[1:, :-1] & sub[:-1, 1:] & sub[1:, 1:]
    for i, j in zip(*np.nonzero(full)):
        px0, py0 = to_px(xs[i], ys[j + 1])
        px1, py1 = to_px(xs[i + 1], ys[j])
        rects.append(
            f'<rect x="{_fmt(px0)}" y="{_fmt(py0)}" '
            f'width="{_fmt(px1 - px0)}" height="{_fmt(py1 - py0)}"/>'
        )
    rects.append("</g>")
    return "\n".join(rects)


def emit_field_csv(path, field: ScalarField, provenance: str = "") -> None:
    """One row per grid node, row-major over the axes, full float precision."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if provenance:
            fh.write(f"# {provenance}\n")
        fh.write(",".join(field.vars) + ",value\n")
        axes = [field.axis(k) for k in range(len(field.resolution))]
        for idx in np.ndindex(*field.resolution):
            coords = ",".join(repr(float(axes[k][i])) for k, i in enumerate(idx))
            fh.write(f"{coords},{repr(float(field.values[idx]))}\n")


def emit_contours_csv(path, contours: ContourSet, provenance: str = "") -> None:
    """Polyline points keyed by polyline id, with a closed flag per row."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if provenance:
            fh.write(f"# {provenance}\n")
        fh.write("polyline,point,x,y,closed\n")
        for pid, line in enumerate(contours.polylines):
            flag = "1" if line.closed else "0"
            for k, (x, y) in enumerate(line.points):
                fh.write(f"{pid},{k},{repr(float(x))},{repr(float(y))},{flag}\n")
