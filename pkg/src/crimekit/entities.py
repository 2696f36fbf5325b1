"""Rule-and-gazetteer entity extraction.

A deterministic stand-in for a learned tagger: tokens get one of five
tags from surface form and sentence position alone, then capitalized
runs merge into spans labeled by gazetteer lookups. Sentence-initial
capitalized words are admitted into spans only on a gazetteer or
title-cue hit, which suppresses sentence-case false positives.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

MONTHS = frozenset({
    "january", "february", "march", "april", "may", "june", "july",
    "august", "september", "october", "november", "december",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
    "oct", "nov", "dec",
})
DAYS = frozenset({
    "monday", "tuesday", "wednesday", "thursday", "friday",
    "saturday", "sunday",
})

_SENTENCE_END = frozenset({".", "!", "?"})
_LEX_RE = re.compile(r"[0-9A-Za-z]+(?:'[0-9A-Za-z]+)*|[^\s0-9A-Za-z]")
_APOSTROPHES = str.maketrans({"‘": "'", "’": "'"})


class Tag(str, Enum):
    PROPER_CANDIDATE = "ProperCandidate"
    WORD = "Word"
    NUMBER = "Number"
    DATE_WORD = "DateWord"
    PUNCT = "Punct"


class Label(str, Enum):
    PERSON = "PERSON"
    ORG = "ORG"
    GPE = "GPE"
    DATE = "DATE"
    OTHER = "OTHER"


@dataclass(frozen=True)
class TaggedToken:
    word: str
    tag: Tag


@dataclass(frozen=True)
class Entity:
    text: str
    label: Label
    start: int
    end: int

    def as_dict(self) -> dict:
        return {"text": self.text, "label": self.label.value,
                "start": self.start, "end": self.end}


def lex(text: str) -> list[str]:
    """Surface tokens: words with internal apostrophes, punctuation split out."""
    normalized = unicodedata.normalize("NFKC", text).translate(_APOSTROPHES)
    return _LEX_RE.findall(normalized)


def _is_capitalized(word: str) -> bool:
    return word[:1].isupper()


def tag_tokens(words: Sequence[str]) -> list[TaggedToken]:
    """Five-way tags from surface form and sentence position only."""
    tagged: list[TaggedToken] = []
    sentence_start = True
    for word in words:
        if not word[:1].isalnum():
            tagged.append(TaggedToken(word, Tag.PUNCT))
            if word in _SENTENCE_END:
                sentence_start = True
            continue
        if word.isdigit():
            tag = Tag.NUMBER
        elif _is_capitalized(word) and word.lower() in MONTHS | DAYS:
            tag = Tag.DATE_WORD
        elif _is_capitalized(word) and not sentence_start:
            tag = Tag.PROPER_CANDIDATE
        else:
            tag = Tag.WORD
        tagged.append(TaggedToken(word, tag))
        sentence_start = False
    return tagged


@dataclass(frozen=True)
class Gazetteers:
    gpe: frozenset[str]
    org: frozenset[str]
    person_titles: frozenset[str]

    def admission_words(self) -> frozenset[str]:
        """Single words that let a sentence-initial token join a span."""
        words = set(self.person_titles)
        for entry in self.gpe | self.org:
            words.update(entry.split(" "))
        return frozenset(words)


def _read_entries(text: str) -> frozenset[str]:
    entries = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.add(line.lower())
    return frozenset(entries)


def load_gazetteers(directory: str | Path) -> Gazetteers:
    """Read gpe.txt, org.txt, person_titles.txt (one entry per line)."""
    directory = Path(directory)
    return Gazetteers(
        gpe=_read_entries((directory / "gpe.txt").read_text("utf-8")),
        org=_read_entries((directory / "org.txt").read_text("utf-8")),
        person_titles=_read_entries((directory / "person_titles.txt").read_text("utf-8")),
    )


def default_gazetteers() -> Gazetteers:
    root = resources.files("crimekit.data").joinpath("gazetteers")
    return Gazetteers(
        gpe=_read_entries(root.joinpath("gpe.txt").read_text("utf-8")),
        org=_read_entries(root.joinpath("org.txt").read_text("utf-8")),
        person_titles=_read_entries(root.joinpath("person_titles.txt").read_text("utf-8")),
    )


def _sentence_initial_flags(tagged: Sequence[TaggedToken]) -> list[bool]:
    flags = []
    sentence_start = True
    for token in tagged:
        if token.tag is Tag.PUNCT:
            flags.append(False)
            if token.word in _SENTENCE_END:
                sentence_start = True
            continue
        flags.append(sentence_start)
        sentence_start = False
    return flags


def _label_proper_span(
    tagged: Sequence[TaggedToken], start: int, end: int, gazetteers: Gazetteers
) -> Entity:
    words = [tagged[i].word for i in range(start, end)]
    span_text = " ".join(words)
    lowered = span_text.lower()
    if lowered in gazetteers.gpe:
        label = Label.GPE
    elif lowered in gazetteers.org:
        label = Label.ORG
    else:
        label = None
        prev = start - 1
        if prev >= 0 and tagged[prev].tag is not Tag.PUNCT:
            if tagged[prev].word.lower() in gazetteers.person_titles:
                label = Label.PERSON
        if label is None and words[0].lower() in gazetteers.person_titles:
            # Leading title cues are cues, not names; strip them.
            while start < end and tagged[start].word.lower() in gazetteers.person_titles:
                start += 1
            if start < end:
                words = [tagged[i].word for i in range(start, end)]
                span_text = " ".join(words)
                label = Label.PERSON
            else:
                return Entity(" ".join(words), Label.OTHER, end, end)
        if label is None:
            label = Label.OTHER
    return Entity(span_text, label, start, end)


def extract_entities(
    tagged: Sequence[TaggedToken], gazetteers: Gazetteers
) -> list[Entity]:
    """Non-overlapping entity spans over the tagged token list.

    Date spans are maximal DateWord/Number runs containing at least one
    DateWord. Proper spans are maximal capitalized runs; label priority
    is GPE, then ORG, then a person-title cue, then OTHER.
    """
    initial = _sentence_initial_flags(tagged)
    admit = gazetteers.admission_words()
    n = len(tagged)
    entities: list[Entity] = []
    i = 0
    while i < n:
        token = tagged[i]
        if token.tag in (Tag.DATE_WORD, Tag.NUMBER):
            j = i
            saw_date_word = False
            while j < n and tagged[j].tag in (Tag.DATE_WORD, Tag.NUMBER):
                saw_date_word = saw_date_word or tagged[j].tag is Tag.DATE_WORD
                j += 1
            if saw_date_word:
                text = " ".join(tagged[t].word for t in range(i, j))
                entities.append(Entity(text, Label.DATE, i, j))
            i = j
            continue
        eligible = token.tag is Tag.PROPER_CANDIDATE or (
            token.tag is Tag.WORD
            and initial[i]
            and _is_capitalized(token.word)
            and token.word.lower() in admit
        )
        if eligible:
            j = i + 1
            while j < n and tagged[j].tag is Tag.PROPER_CANDIDATE:
                j += 1
            entity = _label_proper_span(tagged, i, j, gazetteers)
            if entity.start < entity.end:
                entities.append(entity)
            i = j
            continue
        i += 1
    return entities


def entities_of(text: str, gazetteers: Gazetteers | None = None) -> list[Entity]:
    if gazetteers is None:
        gazetteers = default_gazetteers()
    return extract_entities(tag_tokens(lex(text)), gazetteers)


def entities_json(entities: Iterable[Entity]) -> str:
    """Compact JSON list of {text, label, start, end} for the corpus column."""
    return json.dumps([e.as_dict() for e in entities], separators=(",", ":"))
