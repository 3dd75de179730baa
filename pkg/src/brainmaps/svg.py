"""Dependency-free SVG plots with byte-stable output."""

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptyInput

WIDTH, HEIGHT = 640, 360
MARGIN = 48
SERIES = (("delta", "#1f77b4"), ("eta", "#d62728"), ("zeta", "#2ca02c"))


def _fmt(x):
    return f"{x:.2f}"


def _header(width, height):
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]


def curves_svg(rows, eta_label="eta"):
    """SVG text with one polyline per score (delta, eta, zeta) against lambda.

    ``rows`` are mappings or objects with ``lam``, ``delta``, ``eta`` and
    ``zeta``. Penalties are spaced evenly in grid order.
    """
    rows = list(rows)
    if not rows:
        raise EmptyInput("no rows to plot")

    def get(r, k):
        return r[k] if isinstance(r, dict) else getattr(r, k)

    n = len(rows)
    x0, x1 = MARGIN, WIDTH - MARGIN
    y0, y1 = HEIGHT - MARGIN, MARGIN
    xs = [x0 + (x1 - x0) * (i / (n - 1) if n > 1 else 0.5) for i in range(n)]

    def ypos(v):
        return y0 + (y1 - y0) * min(max(v, 0.0), 1.0)

    out = _header(WIDTH, HEIGHT)
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    for tick in (0.0, 0.5, 1.0):
        out.append(f'<text x="{x0 - 6}" y="{_fmt(ypos(tick) + 4)}" font-size="10" '
                   f'text-anchor="end">{tick:g}</text>')
    for x, r in zip(xs, rows):
        out.append(f'<text x="{_fmt(x)}" y="{y0 + 14}" font-size="9" '
                   f'text-anchor="middle">{get(r, "lam"):g}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:g}" y="{HEIGHT - 10}" font-size="11" '
               f'text-anchor="middle">lambda</text>')
    for i, (key, color) in enumerate(SERIES):
        pts = " ".join(f"{_fmt(x)},{_fmt(ypos(float(get(r, key))))}" for x, r in zip(xs, rows))
        label = eta_label if key == "eta" else key
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}">'
                   f'<title>{escape(label)}</title></polyline>')
        out.append(f'<text x="{x1 - 60}" y="{y1 + 14 * i}" font-size="11" fill="{color}">'
                   f'{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def map_svg(weights, layout):
    """SVG text with one time-course path per channel of a flattened map."""
    weights = np.asarray(weights, dtype=float)
    if weights.size == 0:
        raise EmptyInput("empty map")
    if layout is None:
        layout = (1, weights.size)
    c, t = layout
    if c * t != weights.size:
        raise ValueError(f"layout {layout} does not match map length {weights.size}")
    grid = weights.reshape(c, t)
    peak = float(np.max(np.abs(grid))) or 1.0
    row_h = 40
    height = 2 * MARGIN + row_h * c
    x0, x1 = MARGIN, WIDTH - MARGIN
    out = _header(WIDTH, height)
    for ch in range(c):
        base = MARGIN + row_h * (ch + 0.5)
        xs = [x0 + (x1 - x0) * (k / (t - 1) if t > 1 else 0.5) for k in range(t)]
        ys = [base - 0.45 * row_h * v / peak for v in grid[ch]]
        d = "M" + " L".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
        out.append(f'<line x1="{x0}" y1="{_fmt(base)}" x2="{x1}" y2="{_fmt(base)}" '
                   f'stroke="#cccccc"/>')
        out.append(f'<path d="{d}" fill="none" stroke="black" stroke-width="1"/>')
        out.append(f'<text x="{x0 - 6}" y="{_fmt(base + 4)}" font-size="9" '
                   f'text-anchor="end">ch{ch}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_curves(rows, path, eta_label="eta"):
    Path(path).write_text(curves_svg(rows, eta_label), encoding="utf-8")


def emit_svg_map(weights, layout, path):
    Path(path).write_text(map_svg(weights, layout), encoding="utf-8")
