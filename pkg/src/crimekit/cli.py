"""Command-line entry points.

One subcommand per pipeline stage plus ``run`` for the whole thing.
Every config field can be overridden by a flag; flags win over the JSON
file. Exit codes: 0 success, 2 validation problem, 3 stage failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, CrimekitError, StageFailure
from . import pipeline


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="pipeline config JSON")
    parser.add_argument("--out-dir", dest="out_dir", help="output directory")
    parser.add_argument("--seed", type=int, help="global RNG seed")
    parser.add_argument("--crime-inputs", dest="crime_inputs", nargs="+",
                        help="crime source CSV paths")
    parser.add_argument("--article-inputs", dest="article_inputs", nargs="+",
                        help="article source CSV paths (one or two)")
    parser.add_argument("--dictionary", dest="dictionary_path",
                        help="crime stem dictionary file")
    parser.add_argument("--rules", dest="rules_path", help="crime type ruleset JSON")
    parser.add_argument("--stoplist", dest="stoplist_path", help="stopword file")
    parser.add_argument("--gazetteer-dir", dest="gazetteer_dir",
                        help="directory with gpe.txt, org.txt, person_titles.txt")
    parser.add_argument("--threshold", type=int, help="distinct-stem acceptance threshold")
    parser.add_argument("--min-df", dest="min_df", type=int)
    parser.add_argument("--max-df-ratio", dest="max_df_ratio", type=float)
    parser.add_argument("--max-features", dest="max_features", type=int)
    parser.add_argument("--k", type=int, help="cluster count")
    parser.add_argument("--sweep", help="k sweep: 'A..B' doubles from A to B, or 'a,b,c'")
    parser.add_argument("--eps", type=float, help="density radius")
    parser.add_argument("--min-samples", dest="min_samples", type=int)
    parser.add_argument("--lda-topics", dest="lda_topics", type=int)
    parser.add_argument("--lda-alpha", dest="lda_alpha", type=float)
    parser.add_argument("--lda-beta", dest="lda_beta", type=float)
    parser.add_argument("--lda-iters", dest="lda_iters", type=int)
    parser.add_argument("--top-terms-n", dest="top_terms_n", type=int)
    parser.add_argument("--top-words-n", dest="top_words_n", type=int)
    parser.add_argument("--word-freq-n", dest="word_freq_n", type=int)


_OVERRIDE_KEYS = (
    "out_dir", "seed", "crime_inputs", "article_inputs", "dictionary_path",
    "rules_path", "stoplist_path", "gazetteer_dir", "threshold", "min_df",
    "max_df_ratio", "max_features", "k", "sweep", "eps", "min_samples",
    "lda_topics", "lda_alpha", "lda_beta", "lda_iters", "top_terms_n",
    "top_words_n", "word_freq_n",
)

_STAGE_COMMANDS = {
    "ingest": pipeline.stage_ingest,
    "crimemap": pipeline.stage_crimemap,
    "filter-news": pipeline.stage_filter,
    "vectorize": pipeline.stage_vectorize,
    "kmeans": pipeline.cluster_kmeans,
    "dbscan": pipeline.cluster_dbscan,
    "lda": pipeline.stage_topics,
    "entities": pipeline.stage_entities,
    "stats": pipeline.stage_analytics,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crimekit",
        description="Merge crime records, filter news articles, and cluster them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*_STAGE_COMMANDS, "report", "run"):
        command = sub.add_parser(name)
        _add_common(command)
    return parser


def _load_config(args: argparse.Namespace) -> pipeline.PipelineConfig:
    overrides = {key: getattr(args, key) for key in _OVERRIDE_KEYS}
    return pipeline.PipelineConfig.from_file(args.config, overrides)


def _print_counts(name: str, counts: dict) -> None:
    rendered = ", ".join(f"{key}={value}" for key, value in counts.items())
    print(f"{name}: {rendered}" if rendered else name)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        cfg.validate()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "run":
            manifest = pipeline.run_pipeline(cfg)
            for entry in manifest.stages:
                _print_counts(entry["stage"], entry["counts"])
            print(f"ok: {cfg.out_dir}")
        elif args.command == "report":
            path = pipeline.emit_report(cfg)
            print(f"report: {path}")
        else:
            counts = _STAGE_COMMANDS[args.command](cfg)
            _print_counts(args.command, counts)
            if args.command == "lda":
                top_path = Path(cfg.out_dir) / "topics" / "top_words.csv"
                sys.stdout.write(top_path.read_text("utf-8"))
    except StageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CrimekitError as exc:
        print(f"error: {args.command} failed: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
