"""Merge the two news-article sources and select crime-related articles.

An article qualifies as crime-related when enough distinct dictionary
stems prefix-match its tokens, and the matched set is not fully
explained by one of the exclusion groups (stem sets that co-occur in
articles about traffic accidents, house fires, or business disputes
rather than crime).
"""

from __future__ import annotations

import csv
import datetime as dt
import json
from dataclasses import dataclass, field, fields as dc_fields
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .analytics import SummaryStats, summary_stats
from .errors import ConfigError, MalformedValue, UnknownAttribute, UnrecognizedSchema
from .ingest import ROW_WIDTH_KEY
from .textproc import tokenize


class ArticleSource(str, Enum):
    KAGGLE_NEWS = "KaggleNews"
    EAGER_NEWS = "EagerNews"


ARTICLE_COLUMNS = (
    "DataSource", "ID", "Title", "Publication", "NewlineID", "NewsOutletID",
    "Author", "PublishTime", "OutletName", "Content", "ArticleURL",
)

# Attribute grouped under this key when its value is null.
NULL_KEY = "<null>"

_TIME_FORMAT = "%Y-%m-%d %H:%M:%S"


@dataclass
class Article:
    source_dataset: ArticleSource
    id: str
    content: str
    title: str | None = None
    publication: str | None = None
    newline_id: str | None = None
    news_outlet_id: str | None = None
    author: str | None = None
    publish_time: dt.datetime | None = None
    outlet_name: str | None = None
    article_url: str | None = None

    def text(self) -> str:
        """Title and body concatenated; the surface all matching runs over."""
        return f"{self.title} {self.content}" if self.title else self.content


_FIELD_BY_COLUMN = {
    "DataSource": "source_dataset", "ID": "id", "Title": "title",
    "Publication": "publication", "NewlineID": "newline_id",
    "NewsOutletID": "news_outlet_id", "Author": "author",
    "PublishTime": "publish_time", "OutletName": "outlet_name",
    "Content": "content", "ArticleURL": "article_url",
}

_ARTICLE_ATTRIBUTES = frozenset(f.name for f in dc_fields(Article))
_ARTICLE_FIELD_ORDER = tuple(
    f.name for f in dc_fields(Article) if f.name != "source_dataset"
)


@dataclass(frozen=True)
class _ArticleAdapter:
    source: ArticleSource
    signature: frozenset[str]
    field_map: Mapping[str, str]
    time_format: str


_ARTICLE_ADAPTERS = {
    ArticleSource.KAGGLE_NEWS: _ArticleAdapter(
        source=ArticleSource.KAGGLE_NEWS,
        signature=frozenset({"publication", "date"}),
        field_map={"id": "id", "title": "title", "publication": "publication",
                   "author": "author", "publish_time": "date",
                   "content": "content", "article_url": "url"},
        time_format="%Y-%m-%d",
    ),
    ArticleSource.EAGER_NEWS: _ArticleAdapter(
        source=ArticleSource.EAGER_NEWS,
        signature=frozenset({"NewlineID", "NewsOutletID"}),
        field_map={"id": "NewlineID", "newline_id": "NewlineID",
                   "news_outlet_id": "NewsOutletID", "outlet_name": "OutletName",
                   "publish_time": "PublishTime", "title": "Title",
                   "content": "Content", "article_url": "URL"},
        time_format=_TIME_FORMAT,
    ),
}


def detect_article_schema(header: Iterable[str]) -> ArticleSource | None:
    """Source whose signature the header satisfies; None for the merged schema."""
    columns = set(header)
    if set(ARTICLE_COLUMNS) <= columns:
        return None
    for adapter in _ARTICLE_ADAPTERS.values():
        if adapter.signature <= columns:
            return adapter.source
    raise UnrecognizedSchema(f"no article schema matches {sorted(columns)[:8]}")


def adapt_article(raw: Mapping[str, str], source: ArticleSource) -> Article:
    """Map one raw row onto the 11-attribute schema; absent attributes null."""
    if ROW_WIDTH_KEY in raw:
        raise MalformedValue("row", "extra_cells")
    adapter = _ARTICLE_ADAPTERS[source]
    values: dict[str, object] = {"source_dataset": source}
    for field_name in _ARTICLE_FIELD_ORDER:
        column = adapter.field_map.get(field_name)
        text = (raw.get(column) or "").strip() if column else ""
        if field_name == "content":
            values[field_name] = text
        elif field_name == "id":
            if not text:
                raise MalformedValue("id", "missing")
            values[field_name] = text
        elif field_name == "publish_time":
            if not text:
                values[field_name] = None
            else:
                try:
                    values[field_name] = dt.datetime.strptime(text, adapter.time_format)
                except ValueError:
                    raise MalformedValue("publish_time", f"bad_timestamp:{text!r}")
        else:
            values[field_name] = text or None
    return Article(**values)


@dataclass
class QuarantinedArticle:
    source: ArticleSource
    row_index: int
    row: dict[str, str]
    reason: str


@dataclass
class ArticleMergeReport:
    articles: list[Article]
    quarantined: list[QuarantinedArticle]


def merge_articles(
    a: tuple[ArticleSource, Iterable[Mapping[str, str]]],
    b: tuple[ArticleSource, Iterable[Mapping[str, str]]] | None = None,
) -> ArticleMergeReport:
    """Adapt stream *a* then stream *b*; bad rows are quarantined, not fatal."""
    articles: list[Article] = []
    quarantined: list[QuarantinedArticle] = []
    for source, rows in [s for s in (a, b) if s is not None]:
        for row_index, raw in enumerate(rows):
            try:
                articles.append(adapt_article(raw, source))
            except MalformedValue as exc:
                clean = {k: v for k, v in raw.items() if k != ROW_WIDTH_KEY}
                quarantined.append(QuarantinedArticle(source, row_index, dict(clean), str(exc)))
    return ArticleMergeReport(articles, quarantined)


# ---------------------------------------------------------------------------
# Crime dictionary


DEFAULT_EXCLUSION_GROUPS: tuple[frozenset[str], ...] = (
    frozenset({"vehicle", "accident", "damage"}),
    frozenset({"fire", "damage", "incident"}),
    frozenset({"fraud", "dispute", "offense"}),
)


@dataclass(frozen=True)
class CrimeDictionary:
    stems: frozenset[str]
    exclusion_groups: tuple[frozenset[str], ...] = ()

    def __post_init__(self) -> None:
        if not self.stems:
            raise ConfigError("crime dictionary has no stems")
        for group in self.exclusion_groups:
            extra = group - self.stems
            if extra:
                raise ConfigError(
                    f"exclusion group {sorted(group)} uses unknown stems {sorted(extra)}"
                )


def load_dictionary(
    path: str | Path,
    exclusion_groups: Iterable[Iterable[str]] | None = None,
) -> CrimeDictionary:
    """Read a stem file (one per line, ``#`` comments)."""
    stems = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            stems.add(line.lower())
    groups = tuple(frozenset(g) for g in exclusion_groups) if exclusion_groups is not None else ()
    return CrimeDictionary(frozenset(stems), groups)


def default_dictionary() -> CrimeDictionary:
    text = resources.files("crimekit.data").joinpath("crime_dictionary.txt").read_text("utf-8")
    stems = {
        line.strip().lower()
        for line in text.splitlines()
        if line.strip() and not line.strip().startswith("#")
    }
    return CrimeDictionary(frozenset(stems), DEFAULT_EXCLUSION_GROUPS)


def match_stems(text: str, dictionary: CrimeDictionary) -> set[str]:
    """Distinct dictionary stems that prefix some token (or adjacent run)."""
    tokens = [t.text for t in tokenize(text)]
    if not tokens:
        return set()
    matched: set[str] = set()
    for stem in dictionary.stems:
        parts = stem.split(" ")
        if len(parts) == 1:
            if any(tok.startswith(stem) for tok in tokens):
                matched.add(stem)
        else:
            width = len(parts)
            for i in range(len(tokens) - width + 1):
                if " ".join(tokens[i : i + width]).startswith(stem):
                    matched.add(stem)
                    break
    return matched


def is_crime_article(
    article: Article, dictionary: CrimeDictionary, threshold: int = 3
) -> bool:
    """True when the matched stems clear the threshold and no exclusion
    group fully explains them."""
    if threshold < 1:
        raise ValueError("threshold must be at least 1")
    matched = match_stems(article.text(), dictionary)
    if len(matched) < threshold:
        return False
    return not any(matched <= group for group in dictionary.exclusion_groups)


def filter_articles(
    articles: Iterable[Article], dictionary: CrimeDictionary, threshold: int = 3
) -> list[Article]:
    """Crime-related subset of the corpus, input order preserved."""
    return [a for a in articles if is_crime_article(a, dictionary, threshold)]


# ---------------------------------------------------------------------------
# Grouping


@dataclass
class GroupCount:
    """Counts per attribute value plus stats over the count values."""

    counts: dict[str, int]
    stats: SummaryStats


def group_count(articles: Iterable[Article], key: str) -> GroupCount:
    """Count articles per value of one attribute; nulls group under NULL_KEY."""
    if key not in _ARTICLE_ATTRIBUTES:
        raise UnknownAttribute(f"Article has no attribute {key!r}")
    counts: dict[str, int] = {}
    for article in articles:
        value = getattr(article, key)
        if value is None:
            label = NULL_KEY
        elif isinstance(value, dt.datetime):
            label = value.strftime(_TIME_FORMAT)
        elif isinstance(value, ArticleSource):
            label = value.value
        else:
            label = str(value)
        counts[label] = counts.get(label, 0) + 1
    return GroupCount(counts, summary_stats(list(counts.values())))


# ---------------------------------------------------------------------------
# CSV I/O


def _read_rows(path: str | Path) -> tuple[list[str], Iterator[dict[str, str]]]:
    handle = open(path, newline="", encoding="utf-8")
    reader = csv.reader(handle)
    try:
        header = next(reader)
    except StopIteration:
        handle.close()
        raise UnrecognizedSchema(f"{path}: file has no header row")

    def rows() -> Iterator[dict[str, str]]:
        with handle:
            for cells in reader:
                if not cells:
                    continue
                row = dict(zip(header, cells + [""] * (len(header) - len(cells))))
                if len(cells) > len(header):
                    row[ROW_WIDTH_KEY] = "1"
                yield row

    return header, rows()


def load_article_source(
    path: str | Path,
) -> tuple[ArticleSource | None, Iterator[dict[str, str]]]:
    header, rows = _read_rows(path)
    return detect_article_schema(header), rows


def article_row(article: Article) -> list[str]:
    """The article as CSV cells in ARTICLE_COLUMNS order; null is empty."""
    row = []
    for column in ARTICLE_COLUMNS:
        value = getattr(article, _FIELD_BY_COLUMN[column])
        if value is None:
            row.append("")
        elif isinstance(value, ArticleSource):
            row.append(value.value)
        elif isinstance(value, dt.datetime):
            row.append(value.strftime(_TIME_FORMAT))
        else:
            row.append(str(value))
    return row


def write_articles_csv(articles: Iterable[Article], path: str | Path) -> None:
    """Write the 11-column corpus; the empty string encodes null."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(ARTICLE_COLUMNS)
        for article in articles:
            writer.writerow(article_row(article))


def read_articles_csv(path: str | Path) -> list[Article]:
    """Load a merged/filtered corpus file back into Article objects."""
    header, rows = _read_rows(path)
    if not set(ARTICLE_COLUMNS) <= set(header):
        raise UnrecognizedSchema(f"{path}: not an 11-column article CSV")
    articles = []
    for raw in rows:
        tag = (raw.get("DataSource") or "").strip()
        try:
            source = ArticleSource(tag)
        except ValueError:
            raise MalformedValue("source_dataset", f"unknown_source:{tag!r}")
        values: dict[str, object] = {"source_dataset": source}
        for column in ARTICLE_COLUMNS:
            field_name = _FIELD_BY_COLUMN[column]
            if field_name == "source_dataset":
                continue
            text = (raw.get(column) or "").strip()
            if field_name == "content":
                values[field_name] = text
            elif field_name == "id":
                if not text:
                    raise MalformedValue("id", "missing")
                values[field_name] = text
            elif field_name == "publish_time":
                if not text:
                    values[field_name] = None
                else:
                    try:
                        values[field_name] = dt.datetime.strptime(text, _TIME_FORMAT)
                    except ValueError:
                        raise MalformedValue("publish_time", f"bad_timestamp:{text!r}")
            else:
                values[field_name] = text or None
        articles.append(Article(**values))
    return articles


def write_group_counts_json(result: GroupCount, path: str | Path) -> None:
    payload = {
        "counts": dict(sorted(result.counts.items(), key=lambda kv: (-kv[1], kv[0]))),
        "stats": result.stats.as_dict(),
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
