"""File-based pipeline: 8 stages in fixed order plus a consolidated report.

Every stage reads only files written by earlier stages and writes its
own under ``out_dir/<stage>/``, so any stage can be rerun or inspected
in isolation. One global seed fans out to the stochastic stages with
fixed offsets (k-means uses seed, LDA uses seed + 1), which keeps each
stage independently reproducible.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field, fields as dc_fields
from pathlib import Path
from typing import Callable, Iterable

from . import analytics, cluster, corpus, crimemap, entities, figures, ingest
from . import svgplot, topics, vectorize
from .errors import ConfigError, CrimekitError, MissingStageOutput, StageFailure
from .textproc import default_stoplist, load_stoplist

STAGES = (
    "ingest", "crimemap", "filter", "vectorize",
    "cluster", "topics", "entities", "analytics",
)

# Seed offsets per stochastic stage.
KMEANS_SEED_OFFSET = 0
LDA_SEED_OFFSET = 1


def parse_sweep(text: str) -> list[int]:
    """``A..B`` doubles from A up to B; ``a,b,c`` lists values directly."""
    text = text.strip()
    if ".." in text:
        lo_text, hi_text = text.split("..", 1)
        lo, hi = int(lo_text), int(hi_text)
        if lo < 1 or hi < lo:
            raise ConfigError(f"bad sweep range {text!r}")
        values = []
        k = lo
        while k <= hi:
            values.append(k)
            k *= 2
        return values
    values = [int(part) for part in text.split(",") if part.strip()]
    if not values:
        raise ConfigError(f"bad sweep list {text!r}")
    return values


@dataclass
class PipelineConfig:
    crime_inputs: list[Path] = field(default_factory=list)
    article_inputs: list[Path] = field(default_factory=list)
    out_dir: Path = Path("out")
    seed: int | None = None
    dictionary_path: Path | None = None
    exclusion_groups: list[list[str]] | None = None
    threshold: int = 3
    rules_path: Path | None = None
    stoplist_path: Path | None = None
    gazetteer_dir: Path | None = None
    min_df: int = 5
    max_df_ratio: float = 0.95
    max_features: int = 60
    k: int | None = None
    sweep: list[int] | None = None
    eps: float = 1.0
    min_samples: int = 10
    lda_topics: int = 50
    lda_alpha: float | None = None
    lda_beta: float = 0.01
    lda_iters: int = 1000
    top_terms_n: int = 10
    top_words_n: int = 10
    word_freq_n: int = 50

    _PATH_FIELDS = (
        "out_dir", "dictionary_path", "rules_path", "stoplist_path", "gazetteer_dir",
    )

    @classmethod
    def from_file(cls, path: str | Path, overrides: dict | None = None) -> "PipelineConfig":
        """Load JSON config; relative paths resolve against the config's directory.

        ``overrides`` (CLI flags) replace config values and resolve
        against the working directory instead.
        """
        path = Path(path)
        try:
            raw = json.loads(path.read_text("utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}")
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")

        known = {f.name for f in dc_fields(cls) if not f.name.startswith("_")}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")

        base = path.parent

        def _resolve(p) -> Path:
            p = Path(p)
            return p if p.is_absolute() else base / p

        cfg = cls()
        for key, value in raw.items():
            if key in ("crime_inputs", "article_inputs"):
                setattr(cfg, key, [_resolve(v) for v in value])
            elif key in cls._PATH_FIELDS:
                setattr(cfg, key, _resolve(value) if value is not None else None)
            elif key == "sweep":
                cfg.sweep = parse_sweep(value) if isinstance(value, str) else [int(v) for v in value]
            else:
                setattr(cfg, key, value)

        for key, value in (overrides or {}).items():
            if value is None:
                continue
            if key in ("crime_inputs", "article_inputs"):
                setattr(cfg, key, [Path(v) for v in value])
            elif key in cls._PATH_FIELDS:
                setattr(cfg, key, Path(value))
            elif key == "sweep":
                cfg.sweep = parse_sweep(value) if isinstance(value, str) else list(value)
            else:
                setattr(cfg, key, value)
        return cfg

    def validate(self) -> None:
        """Check everything checkable before any stage runs."""
        if self.seed is None:
            raise ConfigError("seed is mandatory; there is no wall-clock default")
        if not self.crime_inputs:
            raise ConfigError("crime_inputs must list at least one CSV")
        if not self.article_inputs or len(self.article_inputs) > 2:
            raise ConfigError("article_inputs must list one or two CSVs")
        for p in [*self.crime_inputs, *self.article_inputs]:
            if not Path(p).is_file():
                raise ConfigError(f"input path does not exist: {p}")
        for name in ("dictionary_path", "rules_path", "stoplist_path"):
            p = getattr(self, name)
            if p is not None and not Path(p).is_file():
                raise ConfigError(f"{name} does not exist: {p}")
        if self.gazetteer_dir is not None and not Path(self.gazetteer_dir).is_dir():
            raise ConfigError(f"gazetteer_dir does not exist: {self.gazetteer_dir}")
        if self.threshold < 1:
            raise ConfigError("threshold must be at least 1")
        if self.min_df < 1 or self.max_features < 1:
            raise ConfigError("min_df and max_features must be at least 1")
        if not (0.0 < self.max_df_ratio <= 1.0):
            raise ConfigError("max_df_ratio must be in (0, 1]")
        if self.eps <= 0 or self.min_samples < 1:
            raise ConfigError("eps must be positive and min_samples at least 1")
        if self.lda_topics < 1 or self.lda_iters < 1 or self.lda_beta <= 0:
            raise ConfigError("LDA parameters out of range")
        if self.sweep is not None:
            if any(b <= a for a, b in zip(self.sweep, self.sweep[1:])) or not self.sweep:
                raise ConfigError("sweep values must be strictly increasing")
        if self.k is None and self.sweep is None:
            raise ConfigError("set k, a sweep, or both")
        if self.k is None and self.sweep is not None and len(self.sweep) < 3:
            raise ConfigError("cannot pick k from a sweep of fewer than 3 points")
        if self.k is not None and self.k < 1:
            raise ConfigError("k must be at least 1")

    def snapshot(self) -> dict:
        """JSON-friendly copy of the effective configuration."""
        out: dict = {}
        for f in dc_fields(self):
            if f.name.startswith("_"):
                continue
            value = getattr(self, f.name)
            if isinstance(value, Path):
                value = str(value)
            elif isinstance(value, list) and value and isinstance(value[0], Path):
                value = [str(v) for v in value]
            out[f.name] = value
        return out

    def stage_dir(self, stage: str) -> Path:
        return Path(self.out_dir) / stage


# ---------------------------------------------------------------------------
# Shared loading helpers


def _require(path: Path, stage: str) -> Path:
    if not path.is_file():
        raise MissingStageOutput(f"{path} is missing; run the {stage} stage first")
    return path


def _stoplist(cfg: PipelineConfig) -> frozenset[str]:
    if cfg.stoplist_path is not None:
        return load_stoplist(cfg.stoplist_path)
    return default_stoplist()


def _dictionary(cfg: PipelineConfig) -> corpus.CrimeDictionary:
    if cfg.dictionary_path is None:
        base = corpus.default_dictionary()
        if cfg.exclusion_groups is None:
            return base
        return corpus.CrimeDictionary(
            base.stems, tuple(frozenset(g) for g in cfg.exclusion_groups)
        )
    groups = cfg.exclusion_groups if cfg.exclusion_groups is not None else []
    return corpus.load_dictionary(cfg.dictionary_path, groups)


def _mapper(cfg: PipelineConfig) -> crimemap.CrimeTypeMapper:
    if cfg.rules_path is not None:
        return crimemap.compile_rules(crimemap.load_rules(cfg.rules_path))
    return crimemap.default_mapper()


def _gazetteers(cfg: PipelineConfig) -> entities.Gazetteers:
    if cfg.gazetteer_dir is not None:
        return entities.load_gazetteers(cfg.gazetteer_dir)
    return entities.default_gazetteers()


def _filtered_articles(cfg: PipelineConfig) -> list[corpus.Article]:
    path = _require(cfg.stage_dir("filter") / "filtered.csv", "filter")
    return corpus.read_articles_csv(path)


# ---------------------------------------------------------------------------
# Stages


def stage_ingest(cfg: PipelineConfig) -> dict:
    out = cfg.stage_dir("ingest")
    out.mkdir(parents=True, exist_ok=True)
    inputs = []
    for path in cfg.crime_inputs:
        kind, rows = ingest.load_source(path)
        inputs.append((kind, rows))
    report = ingest.merge_sources(inputs)
    ingest.write_canonical_csv(report.dataset, out / "merged.csv")
    ingest.write_quarantine_csv(report.quarantined, out / "quarantine.csv")
    ingest.write_provenance_json(report, out / "provenance.json")
    return {
        "retained": len(report.dataset.records),
        "quarantined": len(report.quarantined),
        "dropped": sum(report.dropped.values()),
    }


def stage_crimemap(cfg: PipelineConfig) -> dict:
    out = cfg.stage_dir("crimemap")
    out.mkdir(parents=True, exist_ok=True)
    dataset = ingest.read_canonical_csv(
        _require(cfg.stage_dir("ingest") / "merged.csv", "ingest")
    )
    mapper = _mapper(cfg)
    with open(out / "records.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["RowIndex", "RawType", "Category"])
        for i, record in enumerate(dataset.records):
            writer.writerow([
                i, record.crime_type or "",
                mapper.canonicalize(record.crime_type).value,
            ])
    distribution = crimemap.category_distribution(dataset, mapper)
    with open(out / "distribution.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["Category", "Count"])
        for category in sorted(distribution, key=lambda c: c.value):
            writer.writerow([category.value, distribution[category]])
    return {"records": len(dataset.records), "categories": len(distribution)}


def stage_filter(cfg: PipelineConfig) -> dict:
    out = cfg.stage_dir("filter")
    out.mkdir(parents=True, exist_ok=True)
    streams = []
    for path in cfg.article_inputs:
        source, rows = corpus.load_article_source(path)
        if source is None:
            raise ConfigError(f"{path} is already a merged corpus, not a source")
        streams.append((source, rows))
    report = corpus.merge_articles(*streams) if len(streams) == 2 else corpus.merge_articles(streams[0])
    corpus.write_articles_csv(report.articles, out / "merged_articles.csv")
    with open(out / "article_quarantine.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["Source", "RowIndex", "Reason", "Row"])
        for q in report.quarantined:
            writer.writerow([q.source.value, q.row_index, q.reason,
                             json.dumps(q.row, sort_keys=True)])
    dictionary = _dictionary(cfg)
    selected = corpus.filter_articles(report.articles, dictionary, cfg.threshold)
    corpus.write_articles_csv(selected, out / "filtered.csv")
    stats = {
        "total": len(report.articles),
        "accepted": len(selected),
        "rate": (len(selected) / len(report.articles)) if report.articles else 0.0,
        "threshold": cfg.threshold,
    }
    (out / "filter_stats.json").write_text(
        json.dumps(stats, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return {"merged": len(report.articles), "quarantined": len(report.quarantined),
            "accepted": len(selected)}


def stage_vectorize(cfg: PipelineConfig) -> dict:
    out = cfg.stage_dir("vectorize")
    out.mkdir(parents=True, exist_ok=True)
    articles = _filtered_articles(cfg)
    stop = _stoplist(cfg)
    voc = vectorize.fit_vocabulary(
        articles, min_df=cfg.min_df, max_df_ratio=cfg.max_df_ratio,
        max_features=cfg.max_features, stoplist=stop,
    )
    dtm = vectorize.transform(voc, articles, stoplist=stop)
    vectorize.write_vocabulary_csv(voc, out / "vocabulary.csv")
    vectorize.write_matrix_csv(dtm, out / "matrix.csv")
    vectorize.write_matrix_binary(dtm, out / "matrix.bin")
    return {"documents": dtm.shape[0], "features": dtm.shape[1]}


def _resolve_k(cfg: PipelineConfig, sweep_pairs: list[tuple[int, float]] | None) -> int:
    if cfg.k is not None:
        return cfg.k
    assert sweep_pairs is not None
    elbow = cluster.flag_elbow(sweep_pairs)
    if elbow is None:
        raise ConfigError("sweep produced no elbow; set k explicitly")
    return elbow


def cluster_kmeans(cfg: PipelineConfig) -> dict:
    out = cfg.stage_dir("cluster")
    out.mkdir(parents=True, exist_ok=True)
    dtm = vectorize.read_matrix_binary(
        _require(cfg.stage_dir("vectorize") / "matrix.bin", "vectorize")
    )
    voc = vectorize.read_vocabulary_csv(
        _require(cfg.stage_dir("vectorize") / "vocabulary.csv", "vectorize")
    )
    seed = cfg.seed + KMEANS_SEED_OFFSET
    sweep_pairs = None
    if cfg.sweep is not None:
        sweep_pairs = cluster.sse_sweep(dtm, cfg.sweep, seed)
        cluster.write_sweep_csv(sweep_pairs, out / "sweep.csv")
    k = _resolve_k(cfg, sweep_pairs)
    model = cluster.kmeans_fit(dtm, k, seed)
    cluster.write_kmeans_model(model, out / "kmeans.json")
    cluster.write_assignments_csv(dtm.doc_ids, model.assignments, out / "assignments.csv")
    n = min(cfg.top_terms_n, len(voc.terms))
    terms = cluster.top_terms(model, voc, n)
    with open(out / "top_terms.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["Cluster", *(f"Term{i + 1}" for i in range(n))])
        for c, row in enumerate(terms):
            writer.writerow([c, *row])
    return {"k": k, "iterations": model.iterations, "sse": model.sse}


def cluster_dbscan(cfg: PipelineConfig) -> dict:
    out = cfg.stage_dir("cluster")
    out.mkdir(parents=True, exist_ok=True)
    dtm = vectorize.read_matrix_binary(
        _require(cfg.stage_dir("vectorize") / "matrix.bin", "vectorize")
    )
    result = cluster.dbscan_fit(dtm, eps=cfg.eps, min_samples=cfg.min_samples)
    cluster.write_dbscan_json(result, out / "dbscan.json")
    cluster.write_assignments_csv(dtm.doc_ids, result.labels, out / "dbscan_assignments.csv")
    sizes, noise = cluster.cluster_sizes(result)
    return {"n_clusters": result.n_clusters, "noise": noise}


def stage_cluster(cfg: PipelineConfig) -> dict:
    counts = cluster_kmeans(cfg)
    counts.update(cluster_dbscan(cfg))
    return counts


def stage_topics(cfg: PipelineConfig) -> dict:
    out = cfg.stage_dir("topics")
    out.mkdir(parents=True, exist_ok=True)
    articles = _filtered_articles(cfg)
    model = topics.lda_fit(
        articles, cfg.lda_topics, alpha=cfg.lda_alpha, beta=cfg.lda_beta,
        iters=cfg.lda_iters, seed=cfg.seed + LDA_SEED_OFFSET,
        stoplist=_stoplist(cfg),
    )
    topics.write_topic_model(model, out / "lda.json")
    topics.write_top_words_csv(model, out / "top_words.csv", n=cfg.top_words_n)
    return {"documents": int(model.theta.shape[0]), "topics": model.n_topics,
            "vocabulary": len(model.vocabulary)}


def stage_entities(cfg: PipelineConfig) -> dict:
    out = cfg.stage_dir("entities")
    out.mkdir(parents=True, exist_ok=True)
    articles = _filtered_articles(cfg)
    gaz = _gazetteers(cfg)
    label_counts = {label.value: 0 for label in entities.Label}
    with open(out / "entities.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow([*corpus.ARTICLE_COLUMNS, "Entities"])
        for article in articles:
            found = entities.entities_of(article.text(), gaz)
            for e in found:
                label_counts[e.label.value] += 1
            writer.writerow([*corpus.article_row(article), entities.entities_json(found)])
    (out / "entity_counts.json").write_text(
        json.dumps(label_counts, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return {"articles": len(articles), "entities": sum(label_counts.values())}


def stage_analytics(cfg: PipelineConfig) -> dict:
    out = cfg.stage_dir("analytics")
    out.mkdir(parents=True, exist_ok=True)
    dataset = ingest.read_canonical_csv(
        _require(cfg.stage_dir("ingest") / "merged.csv", "ingest")
    )
    articles = _filtered_articles(cfg)
    stop = _stoplist(cfg)

    partition = analytics.geo_points(dataset, _mapper(cfg))
    analytics.write_geo_csv(partition, out / "geo.csv")
    geo_svg = svgplot.scatter_svg(
        [(p.long, p.lat) for p in [*partition.points, *partition.outliers]],
        labels=[0] * len(partition.points) + [-1] * len(partition.outliers),
        title="Crime locations", x_label="Longitude", y_label="Latitude",
    )
    svgplot.write_svg(geo_svg, out / "geo.svg")

    freqs = analytics.word_frequencies(articles, stop, n=cfg.word_freq_n)
    analytics.write_frequencies_csv(freqs, out / "word_frequencies.csv")

    hit = corpus.group_count(articles, "outlet_name")
    corpus.write_group_counts_json(hit, out / "hit_times.json")

    dtm = vectorize.read_matrix_binary(
        _require(cfg.stage_dir("vectorize") / "matrix.bin", "vectorize")
    )
    model = cluster.read_kmeans_model(
        _require(cfg.stage_dir("cluster") / "kmeans.json", "cluster")
    )
    projection = analytics.pca_project(dtm, dims=2)
    labels = [int(v) for v in model.assignments]
    analytics.write_projection_csv(projection, labels, out / "projection.csv")
    proj_svg = svgplot.scatter_svg(
        [(float(x), float(y)) for x, y in projection.coords],
        labels=labels,
        title="Document projection", x_label="Component 1", y_label="Component 2",
    )
    svgplot.write_svg(proj_svg, out / "projection.svg")

    sweep_path = cfg.stage_dir("cluster") / "sweep.csv"
    if sweep_path.is_file():
        pairs, elbow = _read_sweep(sweep_path)
        curve = svgplot.line_svg(
            [(float(k), s) for k, s in pairs],
            title="Cluster count against SSE", x_label="k", y_label="SSE",
            mark=elbow,
        )
        svgplot.write_svg(curve, out / "sse.svg")

    return {
        "geo_points": len(partition.points),
        "geo_outliers": len(partition.outliers),
        "geo_skipped": partition.skipped,
        "top_terms": len(freqs),
    }


def _read_sweep(path: Path) -> tuple[list[tuple[int, float]], int | None]:
    pairs: list[tuple[int, float]] = []
    elbow = None
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        next(reader)
        for row in reader:
            k = int(row[0])
            pairs.append((k, float(row[1])))
            if row[2] == "1":
                elbow = k
    return pairs, elbow


_STAGE_FUNCS: dict[str, Callable[[PipelineConfig], dict]] = {
    "ingest": stage_ingest,
    "crimemap": stage_crimemap,
    "filter": stage_filter,
    "vectorize": stage_vectorize,
    "cluster": stage_cluster,
    "topics": stage_topics,
    "entities": stage_entities,
    "analytics": stage_analytics,
}


# ---------------------------------------------------------------------------
# Report


def _read_csv_table(path: Path) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        return [row for row in csv.reader(handle)]


def emit_report(cfg: PipelineConfig) -> Path:
    """Plain-text report with eight sections plus rendered figures.

    Reads only stage outputs, never clocks or counters, so regenerating
    it from the same outputs is byte-identical.
    """
    out = Path(cfg.out_dir) / "report"
    fig_dir = out / "figures"
    fig_dir.mkdir(parents=True, exist_ok=True)

    ingest_dir = cfg.stage_dir("ingest")
    provenance = json.loads(
        _require(ingest_dir / "provenance.json", "ingest").read_text("utf-8")
    )
    distribution_rows = _read_csv_table(
        _require(cfg.stage_dir("crimemap") / "distribution.csv", "crimemap")
    )[1:]
    filter_stats = json.loads(
        _require(cfg.stage_dir("filter") / "filter_stats.json", "filter").read_text("utf-8")
    )
    top_terms_rows = _read_csv_table(
        _require(cfg.stage_dir("cluster") / "top_terms.csv", "cluster")
    )[1:]
    kmeans_meta = json.loads(
        _require(cfg.stage_dir("cluster") / "kmeans.json", "cluster").read_text("utf-8")
    )
    dbscan_meta = json.loads(
        _require(cfg.stage_dir("cluster") / "dbscan.json", "cluster").read_text("utf-8")
    )
    top_words_rows = _read_csv_table(
        _require(cfg.stage_dir("topics") / "top_words.csv", "topics")
    )[1:]
    entity_counts = json.loads(
        _require(cfg.stage_dir("entities") / "entity_counts.json", "entities").read_text("utf-8")
    )

    total_retained = sum(v["retained"] for v in provenance.values())
    lines: list[str] = []
    push = lines.append
    push("CRIME DATA PIPELINE REPORT")
    push("=" * 26)
    push("")

    push("1. Source distribution")
    push("-" * 22)
    for name in sorted(provenance):
        counts = provenance[name]
        share = counts["retained"] / total_retained if total_retained else 0.0
        push(f"  {name}: {counts['retained']} retained ({share:.1%}), "
             f"{counts['quarantined']} quarantined, {counts['dropped']} dropped")
    push(f"  total retained: {total_retained}")
    push("")

    push("2. Crime category distribution")
    push("-" * 30)
    for name, count in sorted(
        ((r[0], int(r[1])) for r in distribution_rows), key=lambda kv: (-kv[1], kv[0])
    ):
        push(f"  {name}: {count}")
    push("")

    push("3. Article filter")
    push("-" * 17)
    push(f"  merged articles: {filter_stats['total']}")
    push(f"  accepted as crime-related: {filter_stats['accepted']} "
         f"({filter_stats['rate']:.1%}) at threshold {filter_stats['threshold']}")
    push("")

    push("4. K-means elbow")
    push("-" * 16)
    sweep_path = cfg.stage_dir("cluster") / "sweep.csv"
    if sweep_path.is_file():
        pairs, elbow = _read_sweep(sweep_path)
        for k, sse in pairs:
            marker = "  <- elbow" if k == elbow else ""
            push(f"  k={k}: sse={sse:.6f}{marker}")
    else:
        push("  single k (no sweep configured)")
    push(f"  fitted k={kmeans_meta['k']}, sse={kmeans_meta['sse']:.6f}, "
         f"iterations={kmeans_meta['iterations']}")
    push("")

    push("5. Cluster keywords")
    push("-" * 19)
    for row in top_terms_rows:
        push(f"  cluster {row[0]}: {', '.join(row[1:])}")
    push("")

    push("6. Density clustering")
    push("-" * 21)
    push(f"  eps={dbscan_meta['eps']}, min_samples={dbscan_meta['min_samples']}")
    push(f"  clusters: {dbscan_meta['n_clusters']}, noise points: {dbscan_meta['noise']}")
    if dbscan_meta["sizes"]:
        push(f"  sizes: {', '.join(str(s) for s in dbscan_meta['sizes'])}")
    push("")

    push("7. Topic model")
    push("-" * 14)
    for row in top_words_rows:
        push(f"  topic {row[0]}: {', '.join(row[1:])}")
    push("")

    push("8. Entities")
    push("-" * 11)
    for label in sorted(entity_counts):
        push(f"  {label}: {entity_counts[label]}")
    push("")

    push("Artifacts")
    push("-" * 9)
    for rel in ("analytics/geo.svg", "analytics/projection.svg", "analytics/sse.svg"):
        if (Path(cfg.out_dir) / rel).is_file():
            push(f"  {rel}")
    push("  report/figures/")
    push("")

    (out / "report.txt").write_text("\n".join(lines), encoding="utf-8")

    # Rendered figures for human readers; data mirrors the SVG artifacts.
    fractions = {
        name: counts["retained"] / total_retained
        for name, counts in provenance.items() if counts["retained"]
    }
    if fractions:
        figures.source_pie(fractions, fig_dir / "source_pie.png")
    figures.category_bar(
        {r[0]: int(r[1]) for r in distribution_rows if int(r[1]) > 0},
        fig_dir / "category_bar.png",
    )
    geo_rows = _read_csv_table(
        _require(cfg.stage_dir("analytics") / "geo.csv", "analytics")
    )[1:]
    figures.geo_scatter(
        [(float(r[0]), float(r[1])) for r in geo_rows if r[3] == "0"],
        [(float(r[0]), float(r[1])) for r in geo_rows if r[3] == "1"],
        fig_dir / "geo_scatter.png",
    )
    if sweep_path.is_file():
        pairs, elbow = _read_sweep(sweep_path)
        figures.sse_elbow(pairs, elbow, fig_dir / "sse_elbow.png")
    projection_rows = _read_csv_table(
        _require(cfg.stage_dir("analytics") / "projection.csv", "analytics")
    )[1:]
    figures.projection_scatter(
        [(float(r[0]), float(r[1])) for r in projection_rows],
        [int(r[2]) if r[2] else -1 for r in projection_rows],
        fig_dir / "projection.png",
    )
    return out / "report.txt"


# ---------------------------------------------------------------------------
# Orchestration


@dataclass
class RunManifest:
    config: dict
    stages: list[dict]
    digests: dict[str, str]

    def as_dict(self) -> dict:
        return {"config": self.config, "stages": self.stages, "digests": self.digests}


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def collect_digests(out_dir: str | Path) -> dict[str, str]:
    """sha256 per output file, keyed by path relative to out_dir."""
    out_dir = Path(out_dir)
    digests = {}
    for path in sorted(out_dir.rglob("*")):
        if path.is_file() and path.name != "manifest.json":
            digests[path.relative_to(out_dir).as_posix()] = _sha256(path)
    return digests


def run_pipeline(cfg: PipelineConfig, with_report: bool = True) -> RunManifest:
    """Execute all stages in order, then the report, then the manifest.

    A stage failure aborts the run but keeps every file written so far;
    the raised error names the failing stage.
    """
    cfg.validate()
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    stages: list[dict] = []
    for name in STAGES:
        start = time.perf_counter()
        try:
            counts = _STAGE_FUNCS[name](cfg)
        except CrimekitError as exc:
            raise StageFailure(name, exc)
        stages.append({
            "stage": name,
            "counts": counts,
            "seconds": round(time.perf_counter() - start, 4),
        })
    if with_report:
        start = time.perf_counter()
        try:
            emit_report(cfg)
        except CrimekitError as exc:
            raise StageFailure("report", exc)
        stages.append({
            "stage": "report",
            "counts": {},
            "seconds": round(time.perf_counter() - start, 4),
        })
    manifest = RunManifest(
        config=cfg.snapshot(),
        stages=stages,
        digests=collect_digests(cfg.out_dir),
    )
    (Path(cfg.out_dir) / "manifest.json").write_text(
        json.dumps(manifest.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest
