"""K-Means with an SSE elbow sweep, plus density clustering with noise.

K-Means runs Lloyd iterations from a seeded k-means++ start; empty
clusters are repaired by seizing the point farthest from its assigned
centroid, which keeps k constant and never raises the SSE. The sweep
warm-starts each k from the previous centroids plus farthest points, so
its SSE trace is non-increasing by construction.

Density clustering uses plain Euclidean distance with an inclusive eps.
On unit-norm TF-IDF rows, eps=1 corresponds to an angle below 60
degrees between documents. Border points attach to the first cluster
that reaches them in ascending-index scan order, making the full
labeling deterministic.
"""

from __future__ import annotations

import csv
import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import KTooLarge
from .vectorize import Vocabulary


@dataclass
class KMeansModel:
    k: int
    centroids: np.ndarray
    assignments: np.ndarray
    sse: float
    iterations: int
    seed: int
    sse_log: list[float] = field(default_factory=list)


@dataclass
class DbscanResult:
    labels: np.ndarray
    eps: float
    min_samples: int
    n_clusters: int


def _as_matrix(m) -> np.ndarray:
    data = np.asarray(getattr(m, "matrix", m), dtype=float)
    if data.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    return data


def _sq_dists_to(data: np.ndarray, centroid: np.ndarray) -> np.ndarray:
    diff = data - centroid
    return np.einsum("ij,ij->i", diff, diff)


def _assign(data: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Argmin-distance labels (ties to the lowest id) and per-point squared distance."""
    sq = np.stack([_sq_dists_to(data, c) for c in centroids], axis=1)
    labels = np.argmin(sq, axis=1)
    return labels, sq[np.arange(len(data)), labels]


def _kmeanspp_init(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = data.shape[0]
    centroids = np.empty((k, data.shape[1]))
    centroids[0] = data[rng.integers(n)]
    closest = _sq_dists_to(data, centroids[0])
    for j in range(1, k):
        total = float(closest.sum())
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=closest / total))
        centroids[j] = data[idx]
        closest = np.minimum(closest, _sq_dists_to(data, centroids[j]))
    return centroids


def kmeans_fit(
    m,
    k: int,
    seed: int,
    max_iter: int = 300,
    tol: float = 1e-6,
    init_centroids: np.ndarray | None = None,
) -> KMeansModel:
    """Lloyd iterations until centroid movement drops below tol.

    ``sse_log`` records the SSE after every assignment pass, so the
    per-iteration non-increase is checkable from the model alone.
    """
    data = _as_matrix(m)
    n = data.shape[0]
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n:
        raise KTooLarge(f"k={k} exceeds {n} rows")

    rng = np.random.default_rng(seed)
    if init_centroids is not None:
        centroids = np.array(init_centroids, dtype=float)
        if centroids.shape != (k, data.shape[1]):
            raise ValueError("init_centroids shape must be (k, n_features)")
    else:
        centroids = _kmeanspp_init(data, k, rng)

    labels = np.zeros(n, dtype=int)
    sse_log: list[float] = []
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        labels, sq = _assign(data, centroids)

        counts = np.bincount(labels, minlength=k)
        empties = deque(np.flatnonzero(counts == 0).tolist())
        seized = np.zeros(n, dtype=bool)
        while empties:
            j = empties.popleft()
            if counts[j] > 0:
                continue
            victim = int(np.argmax(np.where(seized, -np.inf, sq)))
            old = int(labels[victim])
            labels[victim] = j
            centroids[j] = data[victim]
            sq[victim] = 0.0
            seized[victim] = True
            counts[j] += 1
            counts[old] -= 1
            if counts[old] == 0:
                empties.append(old)
        sse_log.append(float(sq.sum()))

        new_centroids = centroids.copy()
        for j in range(k):
            members = data[labels == j]
            if len(members):
                new_centroids[j] = members.mean(axis=0)
        shift = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        if shift < tol:
            break

    labels, sq = _assign(data, centroids)
    return KMeansModel(
        k=k,
        centroids=centroids,
        assignments=labels,
        sse=float(sq.sum()),
        iterations=iterations,
        seed=seed,
        sse_log=sse_log,
    )


def _farthest_points(data: np.ndarray, centroids: np.ndarray, count: int) -> np.ndarray:
    """Coordinates of the ``count`` points farthest from their nearest centroid."""
    _, sq = _assign(data, centroids)
    order = np.argsort(-sq, kind="stable")
    return data[order[:count]]


def sse_sweep(m, k_values: Sequence[int], seed: int, **fit_kwargs) -> list[tuple[int, float]]:
    """Fit every k, warm-starting from the previous centroids.

    Each new k reuses the previous model's centroids and adds the
    farthest points as extra ones, which makes SSE non-increasing in k.
    """
    ks = list(k_values)
    if not ks:
        raise ValueError("k_values must be non-empty")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("k_values must be strictly increasing")

    data = _as_matrix(m)
    result: list[tuple[int, float]] = []
    prev: KMeansModel | None = None
    for k in ks:
        if prev is None:
            model = kmeans_fit(data, k, seed, **fit_kwargs)
        else:
            extra = _farthest_points(data, prev.centroids, k - prev.k)
            init = np.vstack([prev.centroids, extra])
            model = kmeans_fit(data, k, seed, init_centroids=init, **fit_kwargs)
        result.append((k, model.sse))
        prev = model
    return result


def flag_elbow(pairs: Sequence[tuple[int, float]]) -> int | None:
    """The k with the largest second difference of SSE; None under 3 points."""
    if len(pairs) < 3:
        return None
    best_k = None
    best = -np.inf
    for i in range(1, len(pairs) - 1):
        second = pairs[i - 1][1] - 2.0 * pairs[i][1] + pairs[i + 1][1]
        if second > best:
            best = second
            best_k = pairs[i][0]
    return best_k


def dbscan_fit(m, eps: float = 1.0, min_samples: int = 10) -> DbscanResult:
    """Euclidean density clustering; labels are -1 for noise.

    A core point has at least ``min_samples`` neighbors within ``eps``
    inclusive, itself included. Clusters are connected components of
    core points; border points join the first cluster reaching them in
    ascending scan order.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if min_samples < 1:
        raise ValueError("min_samples must be at least 1")
    data = _as_matrix(m)
    n = data.shape[0]
    labels = np.full(n, -1, dtype=int)
    if n == 0:
        return DbscanResult(labels, eps, min_samples, 0)

    sq = np.einsum("ij,ij->i", data, data)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (data @ data.T), 0.0)
    adjacency = d2 <= eps * eps
    neighbor_lists = [np.flatnonzero(adjacency[i]) for i in range(n)]
    core = np.array([len(nb) >= min_samples for nb in neighbor_lists])

    visited = np.zeros(n, dtype=bool)
    cluster_id = 0
    for start in range(n):
        if visited[start] or not core[start]:
            continue
        visited[start] = True
        labels[start] = cluster_id
        queue: deque[int] = deque([start])
        while queue:
            p = queue.popleft()
            for q in neighbor_lists[p]:
                if labels[q] == -1:
                    labels[q] = cluster_id
                if core[q] and not visited[q]:
                    visited[q] = True
                    queue.append(q)
        cluster_id += 1

    return DbscanResult(labels, eps, min_samples, cluster_id)


def top_terms(model: KMeansModel, voc: Vocabulary, n: int = 10) -> list[list[str]]:
    """Per-cluster keywords: highest centroid weight first, ties lexicographic."""
    if model.centroids.shape[1] != len(voc.terms):
        raise ValueError("model and vocabulary have different feature counts")
    if n < 1:
        raise ValueError("n must be at least 1")
    out: list[list[str]] = []
    for centroid in model.centroids:
        order = sorted(range(len(voc.terms)), key=lambda i: (-centroid[i], voc.terms[i]))
        out.append([voc.terms[i] for i in order[:n]])
    return out


def cluster_sizes(result) -> tuple[list[int], int]:
    """Descending cluster sizes plus the noise count."""
    labels = np.asarray(
        result.labels if hasattr(result, "labels") else result.assignments
    )
    if labels.size == 0:
        return [], 0
    noise = int(np.sum(labels == -1))
    sizes = [int(np.sum(labels == c)) for c in sorted(set(labels.tolist())) if c >= 0]
    return sorted(sizes, reverse=True), noise


# ---------------------------------------------------------------------------
# Persistence


def write_kmeans_model(model: KMeansModel, meta_path: str | Path) -> None:
    """JSON metadata next to a little-endian float64 centroid block."""
    meta_path = Path(meta_path)
    centroid_path = meta_path.with_suffix(".centroids.bin")
    centroid_path.write_bytes(np.ascontiguousarray(model.centroids, dtype="<f8").tobytes())
    meta = {
        "k": model.k,
        "seed": model.seed,
        "iterations": model.iterations,
        "sse": model.sse,
        "sse_log": model.sse_log,
        "n_features": int(model.centroids.shape[1]),
        "centroid_file": centroid_path.name,
        "assignments": [int(a) for a in model.assignments],
    }
    meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def read_kmeans_model(meta_path: str | Path) -> KMeansModel:
    meta_path = Path(meta_path)
    meta = json.loads(meta_path.read_text("utf-8"))
    raw = np.frombuffer((meta_path.parent / meta["centroid_file"]).read_bytes(), dtype="<f8")
    centroids = raw.reshape(meta["k"], meta["n_features"]).copy()
    return KMeansModel(
        k=meta["k"],
        centroids=centroids,
        assignments=np.array(meta["assignments"], dtype=int),
        sse=meta["sse"],
        iterations=meta["iterations"],
        seed=meta["seed"],
        sse_log=list(meta["sse_log"]),
    )


def write_assignments_csv(doc_ids: Sequence[str], labels: Sequence[int], path: str | Path) -> None:
    if len(doc_ids) != len(labels):
        raise ValueError("doc_ids and labels differ in length")
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["DocID", "Cluster"])
        for doc_id, label in zip(doc_ids, labels):
            writer.writerow([doc_id, int(label)])


def write_sweep_csv(pairs: Sequence[tuple[int, float]], path: str | Path) -> None:
    elbow = flag_elbow(pairs)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["K", "SSE", "Elbow"])
        for k, sse in pairs:
            writer.writerow([k, repr(sse), "1" if k == elbow else "0"])


def write_dbscan_json(result: DbscanResult, path: str | Path) -> None:
    sizes, noise = cluster_sizes(result)
    payload = {
        "eps": result.eps,
        "min_samples": result.min_samples,
        "n_clusters": result.n_clusters,
        "noise": noise,
        "sizes": sizes,
        "labels": [int(v) for v in result.labels],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
