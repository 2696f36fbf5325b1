"""Dependency-free SVG scatter and line plots.

Every plot uses a fixed 800x600 viewBox and draws one ``<circle>`` per
data point. Categorical series colors come from the 16-color palette
below; the numeric label picks ``PALETTE[label % 16]`` and the noise
label -1 gets a fixed gray. Coordinates are written with two decimals
so identical data yields identical bytes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

# Categorical palette, index = label % 16.
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
    "#98df8a", "#ff9896", "#c5b0d5", "#c49c94",
)
NOISE_COLOR = "#999999"

VIEW_W = 800
VIEW_H = 600
_MARGIN_L = 70
_MARGIN_R = 30
_MARGIN_T = 50
_MARGIN_B = 50


def color_for(label: int | None) -> str:
    if label is None:
        return PALETTE[0]
    if label < 0:
        return NOISE_COLOR
    return PALETTE[label % len(PALETTE)]


def _scale(values: Sequence[float], lo_px: float, hi_px: float) -> list[float]:
    vmin = min(values)
    vmax = max(values)
    if vmax == vmin:
        mid = (lo_px + hi_px) / 2.0
        return [mid for _ in values]
    span = vmax - vmin
    return [lo_px + (v - vmin) * (hi_px - lo_px) / span for v in values]


def _fmt(v: float) -> str:
    return format(v, ".2f")


def _header(title: str) -> list[str]:
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEW_W} {VIEW_H}">',
        f'<rect x="0" y="0" width="{VIEW_W}" height="{VIEW_H}" fill="#ffffff"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{VIEW_W - _MARGIN_L - _MARGIN_R}" '
        f'height="{VIEW_H - _MARGIN_T - _MARGIN_B}" fill="none" stroke="#cccccc"/>',
    ]
    if title:
        parts.append(
            f'<text x="{VIEW_W // 2}" y="30" text-anchor="middle" '
            f'font-family="sans-serif" font-size="18">{_escape(title)}</text>'
        )
    return parts


def _axis_labels(x_label: str, y_label: str, xs: Sequence[float], ys: Sequence[float]) -> list[str]:
    parts = []
    if x_label:
        parts.append(
            f'<text x="{VIEW_W // 2}" y="{VIEW_H - 12}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{_escape(x_label)}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="18" y="{VIEW_H // 2}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13" '
            f'transform="rotate(-90 18 {VIEW_H // 2})">{_escape(y_label)}</text>'
        )
    if xs:
        parts.append(
            f'<text x="{_MARGIN_L}" y="{VIEW_H - _MARGIN_B + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(min(xs))}</text>'
        )
        parts.append(
            f'<text x="{VIEW_W - _MARGIN_R}" y="{VIEW_H - _MARGIN_B + 16}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="11">{_fmt(max(xs))}</text>'
        )
    if ys:
        parts.append(
            f'<text x="{_MARGIN_L - 6}" y="{VIEW_H - _MARGIN_B}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(min(ys))}</text>'
        )
        parts.append(
            f'<text x="{_MARGIN_L - 6}" y="{_MARGIN_T + 4}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(max(ys))}</text>'
        )
    return parts


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def scatter_svg(
    points: Sequence[tuple[float, float]],
    labels: Sequence[int] | None = None,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    radius: float = 3.0,
) -> str:
    """Scatter plot; one circle per point, fill keyed by the point's label."""
    parts = _header(title)
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    parts.extend(_axis_labels(x_label, y_label, xs, ys))
    if points:
        px = _scale(xs, _MARGIN_L, VIEW_W - _MARGIN_R)
        py = _scale(ys, VIEW_H - _MARGIN_B, _MARGIN_T)
        for i in range(len(points)):
            label = None if labels is None else labels[i]
            parts.append(
                f'<circle cx="{_fmt(px[i])}" cy="{_fmt(py[i])}" r="{_fmt(radius)}" '
                f'fill="{color_for(label)}" fill-opacity="0.75"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def line_svg(
    points: Sequence[tuple[float, float]],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    mark: int | None = None,
) -> str:
    """Line plot over sorted x with circle markers; ``mark`` rings one x value."""
    ordered = sorted(points)
    parts = _header(title)
    xs = [p[0] for p in ordered]
    ys = [p[1] for p in ordered]
    parts.extend(_axis_labels(x_label, y_label, xs, ys))
    if ordered:
        px = _scale(xs, _MARGIN_L, VIEW_W - _MARGIN_R)
        py = _scale(ys, VIEW_H - _MARGIN_B, _MARGIN_T)
        path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(px, py))
        parts.append(
            f'<polyline points="{path}" fill="none" stroke="{PALETTE[0]}" stroke-width="2"/>'
        )
        for i in range(len(ordered)):
            parts.append(
                f'<circle cx="{_fmt(px[i])}" cy="{_fmt(py[i])}" r="3.00" '
                f'fill="{PALETTE[0]}"/>'
            )
            if mark is not None and ordered[i][0] == mark:
                parts.append(
                    f'<circle cx="{_fmt(px[i])}" cy="{_fmt(py[i])}" r="8.00" '
                    f'fill="none" stroke="{PALETTE[3]}" stroke-width="2"/>'
                )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(svg: str, path: str | Path) -> None:
    Path(path).write_text(svg, encoding="utf-8")
