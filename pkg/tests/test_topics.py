from __future__ import annotations

from collections import Counter

import numpy as np
import pytest

from crimekit.errors import EmptyCorpus
from crimekit.textproc import terms_of
from crimekit.topics import (
    lda_fit,
    read_topic_model,
    top_words,
    write_top_words_csv,
    write_topic_model,
)

FIRE = ["arson", "blaze", "ember", "flame", "smoke", "torch"]
MONEY = ["ledger", "audit", "profit", "margin", "invoice", "budget"]


def _two_theme_corpus():
    docs = []
    for i in range(10):
        docs.append(" ".join(FIRE[(i + j) % 6] for j in range(24)))
        docs.append(" ".join(MONEY[(i + j) % 6] for j in range(24)))
    return docs


def test_distributions_are_normalized():
    model = lda_fit(_two_theme_corpus(), n_topics=3, iters=50, seed=1)
    assert np.allclose(model.phi.sum(axis=1), 1.0, atol=1e-12)
    assert np.allclose(model.theta.sum(axis=1), 1.0, atol=1e-12)
    assert (model.phi > 0).all() and (model.theta > 0).all()


def test_token_counts_conserved_through_sampling():
    # phi/theta are smoothed versions of the final count tables, so
    # un-smoothing them must reproduce the corpus token counts exactly
    docs = _two_theme_corpus()
    K, beta = 3, 0.01
    model = lda_fit(docs, n_topics=K, alpha=0.5, beta=beta, iters=40, seed=5)
    V = len(model.vocabulary)
    counts = Counter(t for d in docs for t in terms_of(d))
    n_tokens = sum(counts.values())

    # n_dk = theta * (len_d + K*alpha) - alpha
    doc_lengths = np.array([len(terms_of(d)) for d in docs])
    n_dk = model.theta * (doc_lengths[:, None] + K * model.alpha) - model.alpha
    assert np.allclose(n_dk, np.rint(n_dk), atol=1e-9)
    assert np.all(n_dk > -1e-9)
    assert np.allclose(n_dk.sum(axis=1), doc_lengths, atol=1e-9)
    assert n_dk.sum() == pytest.approx(n_tokens, abs=1e-6)

    # n_kw = phi * (n_k + V*beta) - beta, with n_k taken from the
    # document table; per-word totals must match the corpus counts
    n_k = n_dk.sum(axis=0)
    n_kw = model.phi * (n_k[:, None] + V * beta) - beta
    assert np.allclose(n_kw, np.rint(n_kw), atol=1e-6)
    assert np.all(n_kw > -1e-6)
    for w, term in enumerate(model.vocabulary):
        assert n_kw[:, w].sum() == pytest.approx(counts[term], abs=1e-6)


def test_single_topic_closed_form():
    docs = ["crime gun crime", "gun knife", "crime"]
    beta = 0.01
    model = lda_fit(docs, n_topics=1, beta=beta, iters=10, seed=0)
    counts = Counter(t for d in docs for t in terms_of(d))
    n_tokens = sum(counts.values())
    V = len(model.vocabulary)
    for w, term in enumerate(model.vocabulary):
        expected = (counts[term] + beta) / (n_tokens + V * beta)
        assert model.phi[0, w] == pytest.approx(expected, abs=1e-12)
    # with one topic every document is entirely that topic
    assert np.allclose(model.theta, 1.0, atol=1e-15)


def test_disjoint_vocabularies_separate():
    # golden configuration: twenty pure documents over two six-word themes
    model = lda_fit(_two_theme_corpus(), n_topics=2, alpha=0.5, iters=200, seed=0)
    tw = top_words(model, 5)
    themes = []
    for row in tw:
        if set(row) <= set(FIRE):
            themes.append("fire")
        elif set(row) <= set(MONEY):
            themes.append("money")
        else:
            themes.append("mixed")
    assert sorted(themes) == ["fire", "money"]

    # document mixtures follow the same split
    fire_topic = themes.index("fire")
    for d in range(0, 20, 2):
        assert model.theta[d, fire_topic] > 0.9
    for d in range(1, 20, 2):
        assert model.theta[d, fire_topic] < 0.1


def test_same_seed_reproduces_model():
    docs = _two_theme_corpus()
    a = lda_fit(docs, n_topics=2, iters=30, seed=9)
    b = lda_fit(docs, n_topics=2, iters=30, seed=9)
    assert np.array_equal(a.phi, b.phi)
    assert np.array_equal(a.theta, b.theta)


def test_alpha_defaults_to_fifty_over_k():
    docs = _two_theme_corpus()
    model = lda_fit(docs, n_topics=4, iters=1, seed=0)
    assert model.alpha == pytest.approx(12.5)
    explicit = lda_fit(docs, n_topics=4, alpha=0.3, iters=1, seed=0)
    assert explicit.alpha == 0.3


def test_vocabulary_sorted_and_stoplist_applied():
    docs = ["the crime wave", "the gun crime"]
    model = lda_fit(docs, n_topics=1, iters=1, seed=0, stoplist={"the"})
    assert model.vocabulary == ("crime", "gun", "wave")


def test_empty_corpus_rejected():
    with pytest.raises(EmptyCorpus):
        lda_fit([], n_topics=2)
    with pytest.raises(EmptyCorpus):
        lda_fit(["the a an", "of and"], n_topics=2, stoplist={"the", "a", "an", "of", "and"})


def test_top_words_ties_lexicographic():
    docs = ["bb aa", "aa bb"]
    model = lda_fit(docs, n_topics=1, iters=5, seed=0)
    assert top_words(model, 2) == [["aa", "bb"]]
    with pytest.raises(ValueError):
        top_words(model, 3)


def test_topic_model_roundtrip(tmp_path):
    model = lda_fit(_two_theme_corpus(), n_topics=2, iters=20, seed=3)
    meta = tmp_path / "lda.json"
    write_topic_model(model, meta)
    back = read_topic_model(meta)
    assert back.n_topics == model.n_topics
    assert back.vocabulary == model.vocabulary
    assert np.array_equal(back.phi, model.phi)
    assert np.array_equal(back.theta, model.theta)
    assert back.alpha == model.alpha and back.seed == model.seed


def test_top_words_csv_caps_at_vocabulary(tmp_path):
    docs = ["aa bb", "bb cc"]
    model = lda_fit(docs, n_topics=2, iters=5, seed=0)
    p = tmp_path / "words.csv"
    write_top_words_csv(model, p, n=10)
    lines = p.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "Topic,Word1,Word2,Word3"
    assert len(lines) == 3
