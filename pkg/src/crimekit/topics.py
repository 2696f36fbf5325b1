"""Latent Dirichlet Allocation by collapsed Gibbs sampling.

One chain, a fixed number of sweeps, and a final-state readout: phi and
theta come from the last count state with Dirichlet smoothing. That
trades posterior-mean fidelity for exact seeded reproducibility, which
matters more here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyCorpus
from .textproc import terms_of


@dataclass
class TopicModel:
    n_topics: int
    phi: np.ndarray
    theta: np.ndarray
    vocabulary: tuple[str, ...]
    alpha: float
    beta: float
    seed: int
    iterations: int


def _doc_terms(doc, stoplist) -> list[str]:
    text = doc.text() if hasattr(doc, "text") else str(doc)
    terms = terms_of(text)
    if stoplist:
        terms = [t for t in terms if t not in stoplist]
    return terms


def lda_fit(
    docs: Sequence,
    n_topics: int,
    alpha: float | None = None,
    beta: float = 0.01,
    iters: int = 1000,
    seed: int = 0,
    stoplist: Iterable[str] | None = None,
) -> TopicModel:
    """Collapsed Gibbs sampling over token-topic assignments.

    ``alpha`` defaults to 50 / n_topics. The sampler walks tokens in
    document order inside each sweep and consumes one pre-drawn uniform
    per token, so the trajectory is a pure function of the seed.
    """
    if n_topics < 1:
        raise ValueError("n_topics must be at least 1")
    if iters < 1:
        raise ValueError("iters must be at least 1")
    if alpha is None:
        alpha = 50.0 / n_topics
    stop = frozenset(stoplist) if stoplist else frozenset()

    token_lists = [_doc_terms(doc, stop) for doc in docs]
    vocabulary = tuple(sorted({t for doc in token_lists for t in doc}))
    if not vocabulary:
        raise EmptyCorpus("no tokens left after stopwording")
    word_index = {w: i for i, w in enumerate(vocabulary)}

    # Flattened token stream: one entry per token occurrence.
    doc_of = np.concatenate([
        np.full(len(doc), d, dtype=np.int32) for d, doc in enumerate(token_lists)
    ]) if any(token_lists) else np.zeros(0, dtype=np.int32)
    word_of = np.array(
        [word_index[t] for doc in token_lists for t in doc], dtype=np.int32
    )
    n_tokens = len(word_of)
    if n_tokens == 0:
        raise EmptyCorpus("no tokens left after stopwording")

    n_docs = len(token_lists)
    V = len(vocabulary)
    K = n_topics
    rng = np.random.default_rng(seed)

    # The sweep is a tight sequential loop; plain lists beat ndarray
    # scalar indexing by an order of magnitude here.
    docs_flat = doc_of.tolist()
    words_flat = word_of.tolist()
    z = rng.integers(0, K, size=n_tokens, dtype=np.int32).tolist()
    n_dk = [[0] * K for _ in range(n_docs)]
    n_kw = [[0] * V for _ in range(K)]
    n_k = [0] * K
    for i in range(n_tokens):
        t = z[i]
        n_dk[docs_flat[i]][t] += 1
        n_kw[t][words_flat[i]] += 1
        n_k[t] += 1

    v_beta = V * beta
    cumulative = [0.0] * K
    for _ in range(iters):
        uniforms = rng.random(n_tokens).tolist()
        for i in range(n_tokens):
            d = docs_flat[i]
            w = words_flat[i]
            t = z[i]
            doc_row = n_dk[d]
            doc_row[t] -= 1
            n_kw[t][w] -= 1
            n_k[t] -= 1

            total = 0.0
            for k in range(K):
                total += (doc_row[k] + alpha) * (n_kw[k][w] + beta) / (n_k[k] + v_beta)
                cumulative[k] = total
            target = uniforms[i] * total
            t = 0
            while t < K - 1 and cumulative[t] < target:
                t += 1

            z[i] = t
            doc_row[t] += 1
            n_kw[t][w] += 1
            n_k[t] += 1
        if sum(n_k) != n_tokens or sum(map(sum, n_dk)) != n_tokens:
            raise AssertionError("sampler lost tokens; count conservation violated")

    phi = (np.array(n_kw, dtype=float) + beta) / (np.array(n_k, dtype=float)[:, None] + v_beta)
    n_dk = np.array(n_dk, dtype=float)
    doc_lengths = np.array([len(doc) for doc in token_lists], dtype=np.int64)
    theta = (n_dk + alpha) / (doc_lengths[:, None] + K * alpha)
    return TopicModel(
        n_topics=K,
        phi=phi,
        theta=theta,
        vocabulary=vocabulary,
        alpha=alpha,
        beta=beta,
        seed=seed,
        iterations=iters,
    )


def top_words(model: TopicModel, n: int = 10) -> list[list[str]]:
    """Per-topic words by descending weight, ties lexicographic."""
    if n > len(model.vocabulary):
        raise ValueError("n exceeds vocabulary size")
    out: list[list[str]] = []
    for k in range(model.n_topics):
        row = model.phi[k]
        order = sorted(range(len(model.vocabulary)), key=lambda i: (-row[i], model.vocabulary[i]))
        out.append([model.vocabulary[i] for i in order[:n]])
    return out


# ---------------------------------------------------------------------------
# Persistence


def write_topic_model(model: TopicModel, meta_path: str | Path) -> None:
    """JSON metadata plus two little-endian float64 matrix blocks."""
    meta_path = Path(meta_path)
    phi_path = meta_path.with_suffix(".phi.bin")
    theta_path = meta_path.with_suffix(".theta.bin")
    phi_path.write_bytes(np.ascontiguousarray(model.phi, dtype="<f8").tobytes())
    theta_path.write_bytes(np.ascontiguousarray(model.theta, dtype="<f8").tobytes())
    meta = {
        "n_topics": model.n_topics,
        "alpha": model.alpha,
        "beta": model.beta,
        "seed": model.seed,
        "iterations": model.iterations,
        "vocabulary": list(model.vocabulary),
        "n_docs": int(model.theta.shape[0]),
        "phi_file": phi_path.name,
        "theta_file": theta_path.name,
    }
    meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def read_topic_model(meta_path: str | Path) -> TopicModel:
    meta_path = Path(meta_path)
    meta = json.loads(meta_path.read_text("utf-8"))
    V = len(meta["vocabulary"])
    K = meta["n_topics"]
    phi = np.frombuffer((meta_path.parent / meta["phi_file"]).read_bytes(), dtype="<f8")
    theta = np.frombuffer((meta_path.parent / meta["theta_file"]).read_bytes(), dtype="<f8")
    return TopicModel(
        n_topics=K,
        phi=phi.reshape(K, V).copy(),
        theta=theta.reshape(meta["n_docs"], K).copy(),
        vocabulary=tuple(meta["vocabulary"]),
        alpha=meta["alpha"],
        beta=meta["beta"],
        seed=meta["seed"],
        iterations=meta["iterations"],
    )


def write_top_words_csv(model: TopicModel, path: str | Path, n: int = 10) -> None:
    import csv

    n = min(n, len(model.vocabulary))
    words = top_words(model, n)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["Topic", *(f"Word{i + 1}" for i in range(n))])
        for k, row in enumerate(words):
            writer.writerow([k, *row])
