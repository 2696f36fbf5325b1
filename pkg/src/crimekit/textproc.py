"""Deterministic tokenization, stopword removal, and term counting.

Shared by the vectorizer, the topic model, and the word-frequency
reports so that every consumer sees the same token stream.
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

# Alphanumeric runs, keeping apostrophes that sit between alphanumerics
# ("don't" stays one token, a trailing quote does not attach).
WORD_RE = re.compile(r"[0-9A-Za-z]+(?:'[0-9A-Za-z]+)*")

# Curly quotes appear in the news corpus; NFKC leaves U+2018/U+2019 alone,
# so they are folded to the ASCII apostrophe before matching.
_APOSTROPHES = str.maketrans({"‘": "'", "’": "'"})


@dataclass(frozen=True)
class Token:
    """One token: lowercase form, surface form, and its index in the doc."""

    text: str
    original: str
    position: int


def tokenize(text: str) -> list[Token]:
    """Split ``text`` on non-alphanumeric runs into ordered tokens.

    The input is NFKC-normalized first. ``text`` is lowercased in each
    token while ``original`` keeps the surface casing for downstream
    entity tagging.
    """
    normalized = unicodedata.normalize("NFKC", text).translate(_APOSTROPHES)
    return [
        Token(text=m.group(0).lower(), original=m.group(0), position=i)
        for i, m in enumerate(WORD_RE.finditer(normalized))
    ]


def token_texts(tokens: Iterable[Token]) -> list[str]:
    """Lowercase term sequence of a token list."""
    return [t.text for t in tokens]


def terms_of(text: str) -> list[str]:
    """Shorthand for ``token_texts(tokenize(text))``."""
    return token_texts(tokenize(text))


def remove_stopwords(terms: Sequence[str], stoplist: frozenset[str] | set[str]) -> list[str]:
    """Drop terms that appear in ``stoplist`` (exact match), keeping order."""
    return [t for t in terms if t not in stoplist]


def term_counts(terms: Iterable[str]) -> Counter[str]:
    """Count occurrences per term; counts always sum to the input length."""
    return Counter(terms)


def load_stoplist(path: str | Path) -> frozenset[str]:
    """Read a stoplist file: one lowercase word per line, ``#`` comments."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def default_stoplist() -> frozenset[str]:
    """Bundled English stoplist (~150 common words)."""
    text = resources.files("crimekit.data").joinpath("stopwords.txt").read_text(encoding="utf-8")
    return frozenset(
        line.strip().lower()
        for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )
