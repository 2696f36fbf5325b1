"""Document-frequency-pruned vocabulary fitting and TF-IDF weighting.

Weighting is raw in-document term count times a smoothed inverse
document frequency, ln((1 + N) / (1 + df)) + 1, with each document row
L2-normalized afterwards. The smoothing keeps the weight finite on
degenerate corpora and strictly positive for terms present in every
document.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyCorpus, EmptyVocabulary, UnknownTerm
from .textproc import term_counts, terms_of


@dataclass(frozen=True)
class Vocabulary:
    """Lexicographically ordered kept terms with their document frequencies."""

    terms: tuple[str, ...]
    df: dict[str, int]
    n_docs: int

    def __post_init__(self) -> None:
        if len(self.terms) != len(set(self.terms)):
            raise ValueError("vocabulary terms must be distinct")

    def __len__(self) -> int:
        return len(self.terms)

    def index(self) -> dict[str, int]:
        return {term: i for i, term in enumerate(self.terms)}


@dataclass
class DocTermMatrix:
    matrix: np.ndarray
    doc_ids: tuple[str, ...]
    terms: tuple[str, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def _doc_terms(doc, stoplist) -> list[str]:
    text = doc.text() if hasattr(doc, "text") else str(doc)
    terms = terms_of(text)
    if stoplist:
        terms = [t for t in terms if t not in stoplist]
    return terms


def fit_vocabulary(
    docs: Sequence,
    min_df: int = 5,
    max_df_ratio: float = 0.95,
    max_features: int = 60,
    stoplist: Iterable[str] | None = None,
) -> Vocabulary:
    """Prune terms by document-frequency bounds, cap them by corpus count.

    A term is kept when df >= min_df and df/N <= max_df_ratio (strictly
    more than the ratio excludes it). Survivors above ``max_features``
    are dropped lowest-total-count first, ties broken lexicographically,
    and the kept set is finally sorted lexicographically.
    """
    if len(docs) == 0:
        raise EmptyCorpus("cannot fit a vocabulary on zero documents")
    if min_df < 1:
        raise ValueError("min_df must be at least 1")
    if max_features < 1:
        raise ValueError("max_features must be at least 1")
    stop = frozenset(stoplist) if stoplist else frozenset()

    n_docs = len(docs)
    df: dict[str, int] = {}
    total: dict[str, int] = {}
    for doc in docs:
        counts = term_counts(_doc_terms(doc, stop))
        for term, count in counts.items():
            df[term] = df.get(term, 0) + 1
            total[term] = total.get(term, 0) + count

    survivors = [
        term for term, d in df.items()
        if d >= min_df and d / n_docs <= max_df_ratio
    ]
    if not survivors:
        raise EmptyVocabulary(
            f"no term survives df bounds (min_df={min_df}, max_df_ratio={max_df_ratio})"
        )
    survivors.sort(key=lambda t: (-total[t], t))
    kept = sorted(survivors[:max_features])
    return Vocabulary(tuple(kept), {t: df[t] for t in kept}, n_docs)


def idf(voc: Vocabulary, term: str) -> float:
    """Smoothed inverse document frequency; strictly positive."""
    if term not in voc.df:
        raise UnknownTerm(f"{term!r} is not in the vocabulary")
    return math.log((1 + voc.n_docs) / (1 + voc.df[term])) + 1.0


def idf_vector(voc: Vocabulary) -> np.ndarray:
    return np.array([idf(voc, term) for term in voc.terms])


def transform(
    voc: Vocabulary,
    docs: Sequence,
    doc_ids: Sequence[str] | None = None,
    stoplist: Iterable[str] | None = None,
) -> DocTermMatrix:
    """Weight every document over the vocabulary order and L2-normalize rows.

    Out-of-vocabulary tokens contribute nothing; a document with no
    vocabulary hits keeps its all-zero row.
    """
    stop = frozenset(stoplist) if stoplist else frozenset()
    index = voc.index()
    weights = idf_vector(voc)
    matrix = np.zeros((len(docs), len(voc.terms)))
    ids: list[str] = []
    for row, doc in enumerate(docs):
        if doc_ids is not None:
            ids.append(str(doc_ids[row]))
        else:
            ids.append(str(getattr(doc, "id", row)))
        for term, count in term_counts(_doc_terms(doc, stop)).items():
            col = index.get(term)
            if col is not None:
                matrix[row, col] = count * weights[col]
        norm = np.linalg.norm(matrix[row])
        if norm > 0:
            matrix[row] /= norm
    return DocTermMatrix(matrix, tuple(ids), voc.terms)


# ---------------------------------------------------------------------------
# Persistence


def write_vocabulary_csv(voc: Vocabulary, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["Term", "DF", "IDF"])
        for term in voc.terms:
            writer.writerow([term, voc.df[term], repr(idf(voc, term))])
        writer.writerow(["__n_docs__", voc.n_docs, ""])


def read_vocabulary_csv(path: str | Path) -> Vocabulary:
    terms: list[str] = []
    df: dict[str, int] = {}
    n_docs = 0
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        next(reader)
        for row in reader:
            if row[0] == "__n_docs__":
                n_docs = int(row[1])
            else:
                terms.append(row[0])
                df[row[0]] = int(row[1])
    return Vocabulary(tuple(terms), df, n_docs)


def write_matrix_csv(dtm: DocTermMatrix, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["DocID", *dtm.terms])
        for i, doc_id in enumerate(dtm.doc_ids):
            writer.writerow([doc_id, *(repr(float(v)) for v in dtm.matrix[i])])


def read_matrix_csv(path: str | Path) -> DocTermMatrix:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        terms = tuple(header[1:])
        ids: list[str] = []
        rows: list[list[float]] = []
        for row in reader:
            ids.append(row[0])
            rows.append([float(v) for v in row[1:]])
    matrix = np.array(rows) if rows else np.zeros((0, len(terms)))
    return DocTermMatrix(matrix, tuple(ids), terms)


def write_matrix_binary(dtm: DocTermMatrix, path: str | Path) -> None:
    """Dense little-endian float64 rows plus a JSON sidecar for the shape."""
    path = Path(path)
    data = np.ascontiguousarray(dtm.matrix, dtype="<f8")
    path.write_bytes(data.tobytes(order="C"))
    sidecar = {
        "rows": int(dtm.matrix.shape[0]),
        "cols": int(dtm.matrix.shape[1]),
        "dtype": "<f8",
        "order": "C",
        "doc_ids": list(dtm.doc_ids),
        "terms": list(dtm.terms),
    }
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, indent=2) + "\n", encoding="utf-8"
    )


def read_matrix_binary(path: str | Path) -> DocTermMatrix:
    path = Path(path)
    sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text("utf-8"))
    raw = np.frombuffer(path.read_bytes(), dtype="<f8")
    matrix = raw.reshape(sidecar["rows"], sidecar["cols"]).copy()
    return DocTermMatrix(matrix, tuple(sidecar["doc_ids"]), tuple(sidecar["terms"]))
