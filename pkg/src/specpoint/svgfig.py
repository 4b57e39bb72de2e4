"""Deterministic SVG emission for plane figures.

Figures contain the shaded region and the boundary curve as separate
labeled groups so downstream tooling can address them; output bytes depend
only on the inputs.
"""
from __future__ import annotations

import numpy as np

from .homog2d import CellLabel, PlaneSpectrum

_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'


def _f(v: float) -> str:
    return f"{v:.6g}"


class _Canvas:
    def __init__(self, bounds, size=640, pad=30):
        self.x0, self.x1, self.y0, self.y1 = bounds
        self.size = size
        self.pad = pad
        self.sx = (size - 2 * pad) / (self.x1 - self.x0)
        self.sy = (size - 2 * pad) / (self.y1 - self.y0)

    def px(self, x: float) -> float:
        return self.pad + (x - self.x0) * self.sx

    def py(self, y: float) -> float:
        return self.size - self.pad - (y - self.y0) * self.sy


def _region_rects(spectrum: PlaneSpectrum, canvas: _Canvas) -> list[str]:
    """Row-merged rectangles covering the in-spectrum cells."""
    xs, ys = spectrum.xs, spectrum.ys
    dx = xs[1] - xs[0] if xs.size > 1 else 1.0
    dy = ys[1] - ys[0] if ys.size > 1 else 1.0
    rects = []
    mask = spectrum.labels == CellLabel.IN_SPECTRUM
    for j in range(mask.shape[0]):
        row = mask[j]
        i = 0
        while i < row.size:
            if not row[i]:
                i += 1
                continue
            k = i
            while k + 1 < row.size and row[k + 1]:
                k += 1
            x_left = canvas.px(xs[i] - 0.5 * dx)
            x_right = canvas.px(xs[k] + 0.5 * dx)
            y_top = canvas.py(ys[j] + 0.5 * dy)
            y_bot = canvas.py(ys[j] - 0.5 * dy)
            rects.append(
                f'<rect x="{_f(x_left)}" y="{_f(y_top)}" '
                f'width="{_f(x_right - x_left)}" height="{_f(y_bot - y_top)}"/>'
            )
            i = k + 1
    return rects


def _axes(canvas: _Canvas) -> str:
    cx = canvas.px(0.0)
    cy = canvas.py(0.0)
    s = canvas.size
    return (
        '<g id="axes" stroke="#444" stroke-width="1" fill="none">'
        f'<line x1="6" y1="{_f(cy)}" x2="{_f(s - 6.0)}" y2="{_f(cy)}"/>'
        f'<line x1="{_f(cx)}" y1="{_f(s - 6.0)}" x2="{_f(cx)}" y2="6"/>'
        "</g>"
    )


def classify_svg(spectrum: PlaneSpectrum, size: int = 640, title: str = "") -> str:
    bounds = (
        float(spectrum.xs[0]),
        float(spectrum.xs[-1]),
        float(spectrum.ys[0]),
        float(spectrum.ys[-1]),
    )
    canvas = _Canvas(bounds, size)
    pts = spectrum.curve.pairs()
    closed = np.concatenate([pts, pts[:1]])
    poly = " ".join(f"{_f(canvas.px(x))},{_f(canvas.py(y))}" for x, y in closed)
    parts = [
        _HEADER,
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f"<title>{title}</title>" if title else "",
        f'<rect width="{size}" height="{size}" fill="#ffffff"/>',
        '<g id="region" fill="#c8c8c8" stroke="none">',
        *_region_rects(spectrum, canvas),
        "</g>",
        _axes(canvas),
        '<g id="curve" fill="none" stroke="#000000" stroke-width="1.5">',
        f'<polyline points="{poly}"/>',
        "</g>",
        "</svg>",
        "",
    ]
    return "\n".join(p for p in parts if p != "")


def annuli_svg(
    disk_radius: float,
    circle_radii: tuple[float, ...],
    extent: float | None = None,
    size: int = 640,
    title: str = "",
) -> str:
    """Shaded disk plus labeled circles (used by the shift-model figure)."""
    extent = extent or 1.25 * max((disk_radius, *circle_radii))
    canvas = _Canvas((-extent, extent, -extent, extent), size)
    cx, cy = canvas.px(0.0), canvas.py(0.0)
    r_disk = disk_radius * canvas.sx
    circles = "".join(
        f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r * canvas.sx)}"/>' for r in circle_radii
    )
    parts = [
        _HEADER,
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f"<title>{title}</title>" if title else "",
        f'<rect width="{size}" height="{size}" fill="#ffffff"/>',
        f'<g id="region" fill="#c8c8c8" stroke="none">'
        f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r_disk)}"/></g>',
        _axes(canvas),
        f'<g id="curve" fill="none" stroke="#000000" stroke-width="1.5">{circles}</g>',
        "</svg>",
        "",
    ]
    return "\n".join(p for p in parts if p != "")
