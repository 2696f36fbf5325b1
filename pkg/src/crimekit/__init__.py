"""crimekit: merge heterogeneous crime records and mine crime news.

The package turns nine differently shaped crime CSV sources into one
canonical dataset, normalizes free-text crime types into categories,
selects crime-related news articles with a stem dictionary, and runs
TF-IDF vectorization, K-Means/DBSCAN clustering, LDA topics, rule-based
entity extraction, and descriptive analytics over the result. All of it
is reachable through the ``crimekit`` command or as a library.
"""

from .corpus import Article, ArticleSource, CrimeDictionary
from .crimemap import CanonicalCrimeType, CrimeTypeMapper, CrimeTypeRule
from .ingest import CrimeRecord, MergedCrimeDataset, SourceKind
from .pipeline import PipelineConfig, RunManifest, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "Article",
    "ArticleSource",
    "CanonicalCrimeType",
    "CrimeDictionary",
    "CrimeRecord",
    "CrimeTypeMapper",
    "CrimeTypeRule",
    "MergedCrimeDataset",
    "PipelineConfig",
    "RunManifest",
    "SourceKind",
    "run_pipeline",
    "__version__",
]
