"""Descriptive statistics, PCA projection, and geo/word-frequency tables."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateData, EmptyInput
from .textproc import terms_of

# Contiguous-US bounding box as (long_min, long_max, lat_min, lat_max):
# the observed coordinate ranges widened to the east-coast extent.
US_BOUNDS = (-125.0, -66.0, 24.0, 50.0)


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std: float
    p25: float
    p50: float
    p75: float
    p100: float

    def as_dict(self) -> dict[str, float]:
        return {
            "mean": self.mean, "std": self.std, "p25": self.p25,
            "p50": self.p50, "p75": self.p75, "p100": self.p100,
        }


def summary_stats(values: Sequence[float]) -> SummaryStats:
    """Mean, population std, and linearly interpolated quartiles."""
    if len(values) == 0:
        raise EmptyInput("summary_stats needs at least one value")
    arr = np.asarray(values, dtype=float)
    p25, p50, p75 = np.percentile(arr, [25, 50, 75])
    return SummaryStats(
        mean=float(arr.mean()),
        std=float(arr.std(ddof=0)),
        p25=float(p25),
        p50=float(p50),
        p75=float(p75),
        p100=float(arr.max()),
    )


# ---------------------------------------------------------------------------
# PCA via the power method


@dataclass
class Projection2D:
    coords: np.ndarray
    explained_variance: np.ndarray
    components: np.ndarray

    @property
    def n_components(self) -> int:
        return self.components.shape[0]


_POWER_SEED = 0x5CA1AB1E
_POWER_ITERS = 1000
_POWER_TOL = 1e-12


def _orthogonalize(vec: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    for b in basis:
        vec = vec - (vec @ b) * b
    return vec


def _dominant_eigenvector(
    cov: np.ndarray, basis: list[np.ndarray], rng: np.random.Generator
) -> tuple[np.ndarray, float]:
    """Leading eigenvector of ``cov`` restricted to the complement of ``basis``."""
    d = cov.shape[0]
    vec = _orthogonalize(rng.standard_normal(d), basis)
    norm = np.linalg.norm(vec)
    if norm < 1e-15:  # pragma: no cover - needs dims > rank of the space
        raise DegenerateData("no direction left to extract")
    vec /= norm
    for _ in range(_POWER_ITERS):
        nxt = _orthogonalize(cov @ vec, basis)
        norm = np.linalg.norm(nxt)
        if norm < 1e-15:
            # The remaining subspace is a null space; any unit vector in it
            # is an eigenvector with eigenvalue 0.
            return vec, 0.0
        nxt /= norm
        if np.linalg.norm(nxt - vec) < _POWER_TOL or np.linalg.norm(nxt + vec) < _POWER_TOL:
            vec = nxt
            break
        vec = nxt
    return vec, float(vec @ cov @ vec)


def pca_project(matrix, dims: int = 2) -> Projection2D:
    """Project rows onto the top principal components.

    Components come from iterated power extraction with deflation by
    re-orthogonalization; each component's sign is fixed so its
    largest-magnitude entry is positive.
    """
    data = np.asarray(getattr(matrix, "matrix", matrix), dtype=float)
    if data.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    n, d = data.shape
    if n < 2:
        raise ValueError("need at least 2 rows")
    if dims < 1 or dims > d:
        raise ValueError(f"dims must be in [1, {d}]")

    centered = data - data.mean(axis=0)
    cov = (centered.T @ centered) / (n - 1)
    if float(np.trace(cov)) <= 1e-15:
        raise DegenerateData("matrix has zero total variance")

    rng = np.random.default_rng(_POWER_SEED)
    basis: list[np.ndarray] = []
    eigenvalues: list[float] = []
    for _ in range(dims):
        vec, value = _dominant_eigenvector(cov, basis, rng)
        pivot = int(np.argmax(np.abs(vec)))
        if vec[pivot] < 0:
            vec = -vec
        basis.append(vec)
        eigenvalues.append(max(value, 0.0))

    components = np.vstack(basis)
    return Projection2D(
        coords=centered @ components.T,
        explained_variance=np.asarray(eigenvalues),
        components=components,
    )


# ---------------------------------------------------------------------------
# Geo scatter extraction


class GeoPoint(NamedTuple):
    long: float
    lat: float
    category: str


@dataclass
class GeoPartition:
    points: list[GeoPoint]
    outliers: list[GeoPoint]
    skipped: int

    def __len__(self) -> int:
        return len(self.points) + len(self.outliers) + self.skipped


def geo_points(dataset, mapper=None, bounds: tuple[float, float, float, float] = US_BOUNDS) -> GeoPartition:
    """Split records into in-box points, out-of-box outliers, and null-coordinate skips.

    Categories come from ``mapper`` applied to each record's raw crime type.
    """
    if mapper is None:
        from .crimemap import default_mapper

        mapper = default_mapper()
    long_min, long_max, lat_min, lat_max = bounds
    points: list[GeoPoint] = []
    outliers: list[GeoPoint] = []
    skipped = 0
    for record in dataset.records:
        if record.lat is None or record.long is None:
            skipped += 1
            continue
        point = GeoPoint(record.long, record.lat, mapper.canonicalize(record.crime_type).value)
        if long_min <= record.long <= long_max and lat_min <= record.lat <= lat_max:
            points.append(point)
        else:
            outliers.append(point)
    return GeoPartition(points, outliers, skipped)


# ---------------------------------------------------------------------------
# Word frequencies


def word_frequencies(articles: Iterable, stoplist=None, n: int = 50) -> list[tuple[str, int]]:
    """Top-n stopword-filtered terms, by descending count then term."""
    if n < 1:
        raise ValueError("n must be at least 1")
    stop = frozenset(stoplist) if stoplist else frozenset()
    counts: dict[str, int] = {}
    for item in articles:
        text = item.text() if hasattr(item, "text") else str(item)
        for term in terms_of(text):
            if term not in stop:
                counts[term] = counts.get(term, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:n]


# ---------------------------------------------------------------------------
# CSV emission


def write_geo_csv(partition: GeoPartition, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["Long", "Lat", "Category", "Outlier"])
        for point in partition.points:
            writer.writerow([repr(point.long), repr(point.lat), point.category, "0"])
        for point in partition.outliers:
            writer.writerow([repr(point.long), repr(point.lat), point.category, "1"])


def write_frequencies_csv(freqs: list[tuple[str, int]], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["Term", "Count"])
        writer.writerows(freqs)


def write_projection_csv(proj: Projection2D, labels: Sequence[int] | None, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["X", "Y", "Label"])
        for i in range(proj.coords.shape[0]):
            label = "" if labels is None else str(labels[i])
            writer.writerow([repr(float(proj.coords[i, 0])), repr(float(proj.coords[i, 1])), label])
