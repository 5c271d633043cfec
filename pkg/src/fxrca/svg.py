"""Tiny static SVG charts: line series and density overlays.

Deliberately minimal. Fixed canvas, no interactivity, coordinates
formatted to two decimals so output is deterministic.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from fxrca.errors import DomainError

__all__ = ["line_chart"]

_WIDTH = 640
_HEIGHT = 360
_MARGIN = 45
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _scale(values: np.ndarray, lo: float, hi: float, out_lo: float, out_hi: float) -> np.ndarray:
    span = hi - lo
    if span <= 0:
        span = 1.0
    return out_lo + (values - lo) / span * (out_hi - out_lo)


def line_chart(
    series: Sequence[tuple[str, np.ndarray, np.ndarray]],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    vline: float | None = None,
) -> str:
    """Render named (x, y) series as polylines on one shared axis pair.

    ``vline`` draws a dashed vertical marker (e.g. the shock period).
    """
    if not series:
        raise DomainError("nothing to plot")
    xs = np.concatenate([np.asarray(x, dtype=float) for _, x, _ in series])
    ys = np.concatenate([np.asarray(y, dtype=float) for _, _, y in series])
    if xs.size == 0:
        raise DomainError("empty series")
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    pad = 0.05 * (y_hi - y_lo or 1.0)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    left, right = _MARGIN, _WIDTH - 15
    top, bottom = 30, _HEIGHT - _MARGIN
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_WIDTH // 2}" y="18" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{(left + right) // 2}" y="{_HEIGHT - 8}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{x_label}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="14" y="{(top + bottom) // 2}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 14 {(top + bottom) // 2})">{y_label}</text>'
        )
    for tick in np.linspace(x_lo, x_hi, 5):
        px = _scale(np.array([tick]), x_lo, x_hi, left, right)[0]
        parts.append(
            f'<text x="{_fmt(px)}" y="{bottom + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{tick:.4g}</text>'
        )
    for tick in np.linspace(y_lo, y_hi, 5):
        py = _scale(np.array([tick]), y_lo, y_hi, bottom, top)[0]
        parts.append(
            f'<text x="{left - 6}" y="{_fmt(py + 3)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{tick:.4g}</text>'
        )
    if vline is not None:
        px = _scale(np.array([float(vline)]), x_lo, x_hi, left, right)[0]
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{top}" x2="{_fmt(px)}" y2="{bottom}" '
            f'stroke="gray" stroke-dasharray="4,3"/>'
        )
    for index, (name, x, y) in enumerate(series):
        color = _COLORS[index % len(_COLORS)]
        px = _scale(np.asarray(x, dtype=float), x_lo, x_hi, left, right)
        py = _scale(np.asarray(y, dtype=float), y_lo, y_hi, bottom, top)
        points = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{points}"/>'
        )
        parts.append(
            f'<text x="{right - 4}" y="{top + 14 + 14 * index}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11" fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
