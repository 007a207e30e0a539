"""Minimal SVG line chart (polylines plus axes) for error tables."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def line_chart(
    x: list[float],
    series: dict[str, list[float]],
    *,
    title: str = "",
    x_label: str = "n",
    y_label: str = "error",
    width: int = 640,
    height: int = 400,
) -> str:
    """Render ``series`` against ``x``; the y axis is log10 when every finite value is positive.

    Non-finite and (on a log axis) nonpositive points break the polyline.
    """
    finite = [v for ys in series.values() for v in ys if v is not None and math.isfinite(v)]
    log_y = bool(finite) and all(v > 0 for v in finite)
    tr = (lambda v: math.log10(v)) if log_y else (lambda v: v)
    ty = [tr(v) for v in finite] or [0.0]
    y_lo, y_hi = min(ty), max(ty)
    if y_hi - y_lo < 1e-12:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    x_lo, x_hi = min(x), max(x)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0

    left, right, top, bottom = 70, 150, 40, 50
    pw, ph = width - left - right, height - top - bottom
    sx = lambda v: left + (v - x_lo) / (x_hi - x_lo) * pw  # noqa: E731
    sy = lambda v: top + (1.0 - (v - y_lo) / (y_hi - y_lo)) * ph  # noqa: E731

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for tx in _ticks(x_lo, x_hi):
        px = sx(tx)
        out.append(f'<line x1="{px:.1f}" y1="{top + ph}" x2="{px:.1f}" y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{px:.1f}" y="{top + ph + 16}" text-anchor="middle">{tx:g}</text>')
    for tyv in _ticks(y_lo, y_hi):
        py = sy(tyv)
        label = f"1e{tyv:.1f}" if log_y else f"{tyv:.3g}"
        out.append(f'<line x1="{left - 4}" y1="{py:.1f}" x2="{left}" y2="{py:.1f}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{py + 4:.1f}" text-anchor="end">{label}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{escape(x_label)}</text>')
    y_text = escape(f"log10 {y_label}" if log_y else y_label)
    out.append(f'<text x="15" y="{top + ph / 2:.1f}" transform="rotate(-90 15 {top + ph / 2:.1f})" '
               f'text-anchor="middle">{y_text}</text>')
    if title:
        out.append(f'<text x="{left + pw / 2:.1f}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>')

    for i, (name, ys) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        runs, cur = [], []
        for xv, yv in zip(x, ys):
            ok = yv is not None and math.isfinite(yv) and (yv > 0 or not log_y)
            if ok:
                cur.append(f"{sx(xv):.1f},{sy(tr(yv)):.1f}")
            elif cur:
                runs.append(cur)
                cur = []
        if cur:
            runs.append(cur)
        for run in runs:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(run)}"/>')
        ly = top + 14 * i + 8
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 34}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
