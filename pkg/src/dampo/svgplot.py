"""Tiny deterministic SVG line plots.

Hand-rolled on purpose: byte-identical output for identical input makes
the emitted figures golden-file testable, and a parameter stamp rides
along as an XML comment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["Line", "line_plot"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


@dataclass
class Line:
    x: object
    y: object
    label: str = ""
    dash: bool = False


def _nice_ticks(lo: float, hi: float, target: int = 6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _fmt(v: float) -> str:
    return format(v, ".6g")


def line_plot(path, lines, title="", xlabel="", ylabel="", comment="",
              width=720, height=480):
    """Write a line plot of the given Lines as a standalone SVG file."""
    margin_l, margin_r, margin_t, margin_b = 62, 16, 34, 46
    plot_w = width - margin_l - margin_r
    plot_h = height - margin_t - margin_b

    xs = [float(v) for ln in lines for v in ln.x]
    ys = [float(v) for ln in lines for v in ln.y]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    def sx(x):
        return margin_l + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return margin_t + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    if comment:
        parts.append(f"<!-- {comment} -->")
    parts.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    # axes frame and ticks
    parts.append(
        f'<rect x="{margin_l}" y="{margin_t}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333333" stroke-width="1"/>'
    )
    for t in _nice_ticks(x_lo, x_hi):
        px = sx(t)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{margin_t + plot_h}" x2="{_fmt(px)}" '
            f'y2="{margin_t + plot_h + 5}" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{margin_t + plot_h + 18}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{_fmt(t)}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        py = sy(t)
        parts.append(
            f'<line x1="{margin_l - 5}" y1="{_fmt(py)}" x2="{margin_l}" '
            f'y2="{_fmt(py)}" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{margin_l - 8}" y="{_fmt(py + 4)}" font-size="11" '
            f'text-anchor="end" font-family="sans-serif">{_fmt(t)}</text>'
        )
    if y_lo < 0 < y_hi:
        py = sy(0.0)
        parts.append(
            f'<line x1="{margin_l}" y1="{_fmt(py)}" x2="{margin_l + plot_w}" '
            f'y2="{_fmt(py)}" stroke="#bbbbbb" stroke-width="1" stroke-dasharray="2,3"/>'
        )
    for i, ln in enumerate(lines):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(
            f"{_fmt(sx(float(x)))},{_fmt(sy(float(y)))}" for x, y in zip(ln.x, ln.y)
        )
        dash = ' stroke-dasharray="6,4"' if ln.dash else ""
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"{dash}/>'
        )
        if ln.label:
            ly = margin_t + 16 + 16 * i
            lx = margin_l + plot_w - 150
            parts.append(
                f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
                f'stroke="{color}" stroke-width="1.5"{dash}/>'
            )
            parts.append(
                f'<text x="{lx + 28}" y="{ly}" font-size="11" '
                f'font-family="sans-serif">{ln.label}</text>'
            )
    if title:
        parts.append(
            f'<text x="{width / 2:g}" y="20" font-size="13" text-anchor="middle" '
            f'font-family="sans-serif">{title}</text>'
        )
    if xlabel:
        parts.append(
            f'<text x="{margin_l + plot_w / 2:g}" y="{height - 10}" font-size="12" '
            f'text-anchor="middle" font-family="sans-serif">{xlabel}</text>'
        )
    if ylabel:
        parts.append(
            f'<text x="16" y="{margin_t + plot_h / 2:g}" font-size="12" '
            f'text-anchor="middle" font-family="sans-serif" '
            f'transform="rotate(-90 16 {margin_t + plot_h / 2:g})">{ylabel}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
