"""Minimal self-contained SVG rendering of an empirical CDF."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np


def render_cdf_svg(values, title: str = "", width: int = 640, height: int = 420) -> str:
    """Step-function CDF of the values as a standalone SVG document."""
    vals = np.sort(np.asarray(values, dtype=float))
    n = len(vals)
    ml, mr, mt, mb = 56, 16, 34, 44  # margins
    pw, ph = width - ml - mr, height - mt - mb

    def x(v):
        return ml + v * pw

    def y(f):
        return mt + (1.0 - f) * ph

    pts = [(x(0.0), y(0.0))]
    for k, v in enumerate(vals):
        pts.append((x(v), y(k / n)))
        pts.append((x(v), y((k + 1) / n)))
    pts.append((x(1.0), y(1.0)))
    poly = " ".join(f"{px:.2f},{py:.2f}" for px, py in pts)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{escape(title)}</text>'
        )
    # axes
    parts.append(
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>'
    )
    parts.append(f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>')
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        tx, ty = x(tick), y(tick)
        parts.append(
            f'<line x1="{tx:.1f}" y1="{mt + ph}" x2="{tx:.1f}" y2="{mt + ph + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{tx:.1f}" y="{mt + ph + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tick:g}</text>'
        )
        parts.append(
            f'<line x1="{ml - 5}" y1="{ty:.1f}" x2="{ml}" y2="{ty:.1f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{ml - 9}" y="{ty + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{tick:g}</text>'
        )
    parts.append(
        f'<text x="{ml + pw / 2:.0f}" y="{height - 8}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">p</text>'
    )
    parts.append(
        f'<polyline points="{poly}" fill="none" stroke="#1f5fa8" stroke-width="1.6"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts)


def write_cdf_svg(values, path, title: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_cdf_svg(values, title))
