from __future__ import annotations

from pathlib import Path

import pytest

from crimekit.corpus import Article, ArticleSource

FIXTURES = Path(__file__).parent / "fixtures"


def make_article(content: str, *, id: str = "a1", title: str | None = None) -> Article:
    return Article(
        source_dataset=ArticleSource.KAGGLE_NEWS,
        id=id,
        content=content,
        title=title,
    )


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
