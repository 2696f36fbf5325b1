from __future__ import annotations

from collections import Counter

from hypothesis import given
from hypothesis import strategies as st

from crimekit.textproc import (
    default_stoplist,
    load_stoplist,
    remove_stopwords,
    term_counts,
    terms_of,
    token_texts,
    tokenize,
)


def test_tokenize_basic_sentence():
    tokens = tokenize("Police said the Man was arrested.")
    assert token_texts(tokens) == ["police", "said", "the", "man", "was", "arrested"]
    assert [t.original for t in tokens] == ["Police", "said", "the", "Man", "was", "arrested"]
    assert [t.position for t in tokens] == list(range(6))


def test_tokenize_keeps_interior_apostrophe():
    assert terms_of("don't shoot") == ["don't", "shoot"]
    # a trailing quote is a delimiter, not part of the token
    assert terms_of("the suspects' car") == ["the", "suspects", "car"]


def test_tokenize_folds_curly_apostrophe():
    assert terms_of("don’t") == ["don't"]


def test_tokenize_numbers_and_punctuation():
    assert terms_of("3 shots; 2 wounded!") == ["3", "shots", "2", "wounded"]


def test_tokenize_empty_and_symbol_only():
    assert tokenize("") == []
    assert tokenize("—; …!") == []


def test_remove_stopwords_keeps_order():
    terms = ["the", "man", "was", "shot", "the", "end"]
    assert remove_stopwords(terms, {"the", "was"}) == ["man", "shot", "end"]


def test_term_counts_matches_counter():
    terms = terms_of("gun gun crime city gun")
    counts = term_counts(terms)
    assert counts == Counter({"gun": 3, "crime": 1, "city": 1})


def test_load_stoplist_skips_comments(tmp_path):
    p = tmp_path / "stop.txt"
    p.write_text("# header\nthe\nAnd\n\n  of  \n", encoding="utf-8")
    assert load_stoplist(p) == frozenset({"the", "and", "of"})


def test_default_stoplist_contents():
    stoplist = default_stoplist()
    assert {"the", "and", "of", "a", "in"} <= stoplist
    assert "crime" not in stoplist
    assert all(w == w.lower() for w in stoplist)


@given(st.text(max_size=300))
def test_tokenize_lowercase_invariant(text):
    for token in tokenize(text):
        assert token.text == token.original.lower()
        assert token.text


@given(st.text(max_size=300))
def test_tokenize_positions_are_sequential(text):
    tokens = tokenize(text)
    assert [t.position for t in tokens] == list(range(len(tokens)))


@given(st.lists(st.sampled_from(["a", "b", "cc", "dd"]), max_size=50))
def test_term_counts_total_equals_length(terms):
    assert sum(term_counts(terms).values()) == len(terms)


@given(st.lists(st.sampled_from(["a", "b", "cc"]), max_size=40))
def test_remove_stopwords_is_idempotent(terms):
    stoplist = frozenset({"a", "cc"})
    once = remove_stopwords(terms, stoplist)
    assert remove_stopwords(once, stoplist) == once
