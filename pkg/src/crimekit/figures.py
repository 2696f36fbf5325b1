"""Matplotlib report figures rendered to PNG files.

Used only by the report path; the pipeline's machine-readable plot
artifacts are the SVG files. Figures are rendered on the Agg backend
with the software metadata chunk stripped so reruns produce identical
bytes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .svgplot import NOISE_COLOR, PALETTE

_SAVE_KWARGS = {"dpi": 100, "metadata": {"Software": None}}


def _finish(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path


def _colors(labels: Sequence[int]) -> list[str]:
    return [NOISE_COLOR if v < 0 else PALETTE[v % len(PALETTE)] for v in labels]


def source_pie(fractions: dict[str, float], path: str | Path) -> Path:
    """Share of retained records per source."""
    items = sorted(fractions.items(), key=lambda kv: (-kv[1], kv[0]))
    names = [k for k, _ in items]
    values = [v for _, v in items]
    fig, ax = plt.subplots(figsize=(8, 6))
    ax.pie(values, labels=names, autopct="%1.1f%%", startangle=90,
           colors=[PALETTE[i % len(PALETTE)] for i in range(len(values))])
    ax.set_title("Records per source")
    return _finish(fig, path)


def category_bar(counts: dict[str, int], path: str | Path) -> Path:
    """Crime-category counts, largest first."""
    items = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    names = [k for k, _ in items]
    values = [v for _, v in items]
    fig, ax = plt.subplots(figsize=(8, 6))
    ax.bar(range(len(values)), values, color=PALETTE[0])
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=60, ha="right", fontsize=8)
    ax.set_ylabel("Records")
    ax.set_title("Canonical crime categories")
    fig.tight_layout()
    return _finish(fig, path)


def geo_scatter(
    points: Sequence[tuple[float, float]],
    outliers: Sequence[tuple[float, float]],
    path: str | Path,
) -> Path:
    """Longitude/latitude scatter; outliers drawn as red crosses."""
    fig, ax = plt.subplots(figsize=(8, 6))
    if points:
        ax.scatter([p[0] for p in points], [p[1] for p in points],
                   s=6, color=PALETTE[0], alpha=0.6, label="in range")
    if outliers:
        ax.scatter([p[0] for p in outliers], [p[1] for p in outliers],
                   s=20, color=PALETTE[3], marker="x", label="outliers")
    ax.set_xlabel("Longitude")
    ax.set_ylabel("Latitude")
    ax.set_title("Recorded crime locations")
    if points or outliers:
        ax.legend(loc="lower left", fontsize=8)
    fig.tight_layout()
    return _finish(fig, path)


def sse_elbow(pairs: Sequence[tuple[int, float]], elbow: int | None, path: str | Path) -> Path:
    """SSE against k with the flagged elbow ringed."""
    ordered = sorted(pairs)
    ks = [k for k, _ in ordered]
    sses = [s for _, s in ordered]
    fig, ax = plt.subplots(figsize=(8, 6))
    ax.plot(ks, sses, marker="o", color=PALETTE[0])
    if elbow is not None and elbow in ks:
        idx = ks.index(elbow)
        ax.scatter([elbow], [sses[idx]], s=160, facecolors="none",
                   edgecolors=PALETTE[3], linewidths=2, zorder=3)
    ax.set_xlabel("k")
    ax.set_ylabel("SSE")
    ax.set_title("Cluster count against SSE")
    fig.tight_layout()
    return _finish(fig, path)


def projection_scatter(
    coords: Sequence[tuple[float, float]],
    labels: Sequence[int],
    path: str | Path,
    title: str = "Document projection",
) -> Path:
    """2-d projection colored by cluster label."""
    fig, ax = plt.subplots(figsize=(8, 6))
    if len(coords):
        ax.scatter([c[0] for c in coords], [c[1] for c in coords],
                   s=12, c=_colors(labels), alpha=0.8)
    ax.set_xlabel("Component 1")
    ax.set_ylabel("Component 2")
    ax.set_title(title)
    fig.tight_layout()
    return _finish(fig, path)
