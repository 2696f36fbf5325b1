from __future__ import annotations

import math
import random

import numpy as np
import pytest

from crimekit.errors import EmptyCorpus, EmptyVocabulary, UnknownTerm
from crimekit.vectorize import (
    DocTermMatrix,
    Vocabulary,
    fit_vocabulary,
    idf,
    idf_vector,
    read_matrix_binary,
    read_matrix_csv,
    read_vocabulary_csv,
    transform,
    write_matrix_binary,
    write_matrix_csv,
    write_vocabulary_csv,
)

TERMS = ["ape", "bat", "cat", "dog", "eel", "fox", "gnu", "hen"]


def _random_corpus(rng: random.Random, max_docs: int = 30, max_terms: int = 8):
    terms = TERMS[: rng.randint(2, max_terms)]
    docs = []
    for _ in range(rng.randint(2, max_docs)):
        length = rng.randint(1, 12)
        docs.append(" ".join(rng.choice(terms) for _ in range(length)))
    return docs


def _reference_tfidf(docs: list[str], vocabulary: list[str]):
    """Independent reimplementation from the weighting definitions."""
    n = len(docs)
    tokenized = [d.split() for d in docs]
    df = {t: sum(1 for doc in tokenized if t in doc) for t in vocabulary}
    out = []
    for doc in tokenized:
        row = []
        for t in vocabulary:
            tf = doc.count(t)
            row.append(tf * (math.log((1 + n) / (1 + df[t])) + 1.0))
        norm = math.sqrt(sum(x * x for x in row))
        out.append([x / norm for x in row] if norm > 0 else row)
    return out, df


def test_matches_reference_on_random_corpora():
    rng = random.Random(1234)
    for _ in range(25):
        docs = _random_corpus(rng)
        voc = fit_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_features=len(TERMS))
        dtm = transform(voc, docs)
        expected, df = _reference_tfidf(docs, list(voc.terms))
        assert np.allclose(dtm.matrix, np.array(expected), atol=1e-9)
        assert voc.df == {t: df[t] for t in voc.terms}


def test_df_pruning_bounds():
    # A appears in 4 docs, B in 5, C in 96 of 100: min_df=5 removes A,
    # the 0.95 ratio cap removes C, so only B survives.
    docs = []
    for i in range(100):
        parts = ["filler"]
        if i < 4:
            parts.append("alpha")
        if i < 5:
            parts.append("bravo")
        if i < 96:
            parts.append("charlie")
        docs.append(" ".join(parts))
    voc = fit_vocabulary(docs, min_df=5, max_df_ratio=0.95, max_features=60)
    # "filler" has df=100 -> ratio 1.0 > 0.95, "charlie" 0.96 > 0.95
    assert voc.terms == ("bravo",)
    assert voc.df == {"bravo": 5}


def test_max_df_boundary_is_inclusive():
    # df/N exactly at the ratio stays in
    docs = ["keep common"] * 19 + ["common"]
    voc = fit_vocabulary(docs, min_df=1, max_df_ratio=0.95, max_features=10)
    assert "keep" in voc.terms  # 19/20 = 0.95 exactly
    assert "common" not in voc.terms  # 20/20 = 1.0


def test_max_features_prefers_high_total_count():
    docs = ["aa aa aa bb", "aa bb cc", "bb cc dd"]
    voc = fit_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_features=2)
    # totals: aa=4, bb=3, cc=2, dd=1
    assert voc.terms == ("aa", "bb")


def test_max_features_tie_breaks_lexicographically():
    docs = ["zz yy", "zz yy", "xx"]
    voc = fit_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_features=1)
    # zz and yy tie on total count 2; yy wins the tie
    assert voc.terms == ("yy",)


def test_vocabulary_sorted_lexicographically():
    docs = ["zebra apple", "zebra apple mango", "mango apple"]
    voc = fit_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_features=10)
    assert voc.terms == tuple(sorted(voc.terms))


def test_fit_vocabulary_errors():
    with pytest.raises(EmptyCorpus):
        fit_vocabulary([], min_df=1)
    with pytest.raises(EmptyVocabulary):
        fit_vocabulary(["a b", "c d"], min_df=3)
    with pytest.raises(ValueError):
        fit_vocabulary(["a"], min_df=0)
    with pytest.raises(ValueError):
        fit_vocabulary(["a"], min_df=1, max_features=0)


def test_idf_formula_and_unknown_term():
    voc = Vocabulary(terms=("crime",), df={"crime": 1}, n_docs=2)
    assert idf(voc, "crime") == pytest.approx(math.log(3 / 2) + 1.0, abs=1e-15)
    with pytest.raises(UnknownTerm):
        idf(voc, "gun")
    assert idf_vector(voc).tolist() == [idf(voc, "crime")]


def test_idf_positive_even_for_ubiquitous_terms():
    voc = Vocabulary(terms=("the",), df={"the": 50}, n_docs=50)
    assert idf(voc, "the") > 0


def test_transform_rows_unit_norm_or_zero():
    docs = ["crime crime gun", "gun", "nothing matches here"]
    voc = Vocabulary(terms=("crime", "gun"), df={"crime": 1, "gun": 2}, n_docs=3)
    dtm = transform(voc, docs)
    norms = np.linalg.norm(dtm.matrix, axis=1)
    assert norms[0] == pytest.approx(1.0, abs=1e-12)
    assert norms[1] == pytest.approx(1.0, abs=1e-12)
    assert norms[2] == 0.0
    assert dtm.doc_ids == ("0", "1", "2")
    assert dtm.shape == (3, 2)


def test_transform_doc_ids_from_attribute():
    class Doc:
        def __init__(self, id, body):
            self.id = id
            self.body = body

        def text(self):
            return self.body

    docs = [Doc("d9", "crime gun"), Doc("d4", "crime")]
    voc = Vocabulary(terms=("crime", "gun"), df={"crime": 2, "gun": 1}, n_docs=2)
    dtm = transform(voc, docs)
    assert dtm.doc_ids == ("d9", "d4")
    explicit = transform(voc, docs, doc_ids=["a", "b"])
    assert explicit.doc_ids == ("a", "b")


def test_transform_respects_stoplist():
    docs = ["the crime", "crime the the"]
    voc = fit_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_features=5,
                         stoplist={"the"})
    assert voc.terms == ("crime",)
    dtm = transform(voc, docs, stoplist={"the"})
    assert np.allclose(dtm.matrix, [[1.0], [1.0]])


def test_vocabulary_rejects_duplicate_terms():
    with pytest.raises(ValueError):
        Vocabulary(terms=("a", "a"), df={"a": 1}, n_docs=1)


def test_vocabulary_roundtrip(tmp_path):
    docs = ["crime gun knife", "crime gun", "crime"]
    voc = fit_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_features=10)
    p = tmp_path / "vocab.csv"
    write_vocabulary_csv(voc, p)
    back = read_vocabulary_csv(p)
    assert back == voc


def test_matrix_csv_roundtrip(tmp_path):
    rng = random.Random(7)
    docs = _random_corpus(rng)
    voc = fit_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_features=8)
    dtm = transform(voc, docs)
    p = tmp_path / "matrix.csv"
    write_matrix_csv(dtm, p)
    back = read_matrix_csv(p)
    assert back.doc_ids == dtm.doc_ids
    assert back.terms == dtm.terms
    assert np.allclose(back.matrix, dtm.matrix, atol=1e-12)


def test_matrix_binary_roundtrip_is_exact(tmp_path):
    rng = random.Random(11)
    docs = _random_corpus(rng)
    voc = fit_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_features=8)
    dtm = transform(voc, docs)
    p = tmp_path / "matrix.bin"
    write_matrix_binary(dtm, p)
    back = read_matrix_binary(p)
    assert back.doc_ids == dtm.doc_ids
    assert back.terms == dtm.terms
    # binary persistence is bit-exact, not just close
    assert np.array_equal(back.matrix, dtm.matrix)
    assert back.matrix.dtype == np.float64
