"""Minimal deterministic SVG line plots for traces.

Emits plain SVG text so plotting needs no third-party dependency and a
given input always yields byte-identical output.
"""

from __future__ import annotations

import numpy as np

from .trace import RunTrace

__all__ = ["render_columns", "render_escape_overlay", "PlotError"]

WIDTH, HEIGHT = 720, 480
MARGIN = 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


class PlotError(ValueError):
    """Plot request cannot be satisfied (unknown column, empty trace)."""


def _scale(values: np.ndarray, lo: float, hi: float, out_lo: float, out_hi: float) -> np.ndarray:
    if hi == lo:
        return np.full_like(values, 0.5 * (out_lo + out_hi))
    return out_lo + (values - lo) / (hi - lo) * (out_hi - out_lo)


def _polyline(xs: np.ndarray, ys: np.ndarray, color: str, label: str) -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    return f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"><title>{label}</title></polyline>'


def _frame(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" height="{HEIGHT - 2 * MARGIN}" '
        'fill="none" stroke="#333333" stroke-width="1"/>',
        f'<text x="{WIDTH // 2}" y="{MARGIN - 15}" text-anchor="middle" font-family="monospace" '
        f'font-size="14">{title}</text>',
    ]


def render_columns(traces: list[RunTrace], columns: list[str], labels: list[str] | None = None) -> str:
    """One polyline per (trace, column) pair over the step axis."""
    if not traces or not columns:
        raise PlotError("need at least one trace and one column")
    if labels is None:
        labels = [f"trace{i}" for i in range(len(traces))]
    series = []
    for trace, label in zip(traces, labels):
        if trace.steps == 0:
            raise PlotError(f"{label}: trace has no rows")
        for col in columns:
            try:
                ys = trace.column(col)
            except KeyError:
                raise PlotError(f"unknown trace column {col!r}") from None
            series.append((label, col, trace.column("step"), ys))

    all_y = np.concatenate([s[3] for s in series])
    all_x = np.concatenate([s[2] for s in series])
    y_lo, y_hi = float(all_y.min()), float(all_y.max())
    x_lo, x_hi = float(all_x.min()), float(all_x.max())

    parts = _frame(" / ".join(columns))
    for i, (label, col, xs, ys) in enumerate(series):
        px = _scale(xs, x_lo, x_hi, MARGIN, WIDTH - MARGIN)
        py = _scale(ys, y_lo, y_hi, HEIGHT - MARGIN, MARGIN)
        color = PALETTE[i % len(PALETTE)]
        parts.append(_polyline(px, py, color, f"{label}:{col}"))
        parts.append(
            f'<text x="{MARGIN + 6}" y="{MARGIN + 16 + 14 * i}" font-family="monospace" '
            f'font-size="11" fill="{color}">{label}:{col}</text>'
        )
    parts.append(
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 12}" text-anchor="middle" font-family="monospace" '
        'font-size="12">step</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_escape_overlay(
    curve_x: np.ndarray,
    curve_y: np.ndarray,
    iterates: dict[str, np.ndarray],
    value_of,
) -> str:
    """Landscape curve with per-method iterate markers (1-D demos)."""
    x_lo, x_hi = float(curve_x.min()), float(curve_x.max())
    y_lo, y_hi = float(curve_y.min()), float(curve_y.max())
    parts = _frame("landscape and iterates")
    px = _scale(curve_x, x_lo, x_hi, MARGIN, WIDTH - MARGIN)
    py = _scale(curve_y, y_lo, y_hi, HEIGHT - MARGIN, MARGIN)
    parts.append(_polyline(px, py, "#333333", "landscape"))
    for i, (label, xs) in enumerate(iterates.items()):
        color = PALETTE[(i + 1) % len(PALETTE)]
        ys = np.array([value_of(x) for x in xs])
        mx = _scale(np.asarray(xs, dtype=np.float64), x_lo, x_hi, MARGIN, WIDTH - MARGIN)
        my = _scale(ys, y_lo, y_hi, HEIGHT - MARGIN, MARGIN)
        parts.append(_polyline(mx, my, color, label))
        for x, y in zip(mx, my):
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.5" fill="{color}"/>')
        parts.append(
            f'<text x="{MARGIN + 6}" y="{MARGIN + 16 + 14 * i}" font-family="monospace" '
            f'font-size="11" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
