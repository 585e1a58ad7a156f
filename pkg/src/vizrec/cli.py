"""Command-line entry point.

Subcommands: ``build`` (repository -> index bundle + JSON report), ``eval``
(triplet-based model/judgement agreement report), ``serve`` (HTTP service
over a bundle), ``search`` (console search against a bundle), and
``triplets`` (emit a sampled triplet CSV). Exit codes: 0 success, 1 runtime
failure, 2 usage or configuration error. Log level comes from the
``VIZREC_LOG_LEVEL`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .config import RunConfig, load_config
from .errors import (
    BundleFormatError,
    ConfigError,
    InsufficientCorpus,
    IoError,
    VizrecError,
)
from .eval_harness import (
    agreement_report,
    embedding_scorer,
    format_report_table,
    lda_scorer,
    load_gold_csv,
    load_judgements_csv,
    load_triplets_csv,
    lsi_scorer,
    sample_triplets,
    synthetic_judgements,
    tfidf_scorer,
    write_report,
    write_triplets_csv,
)
from .models import (
    fit_lda,
    fit_lsi,
    fit_tfidf,
    load_word_vectors,
    tfidf_matrix,
)
from .recommender_service import build_index, load_bundle, serve
from .spec_ingest import load_repository
from .text_pipeline import ALL_TEXT, StopWordList, build_document, default_stop_words

log = logging.getLogger("vizrec")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _setup_logging() -> None:
    level = os.environ.get("VIZREC_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _load_base_config(args) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    overrides = {
        "repo": "repo_path",
        "bundle": "bundle_path",
        "seed": "seed",
        "host": "host",
        "port": "port",
    }
    for flag, field_name in overrides.items():
        value = getattr(args, flag, None)
        if value is not None:
            setattr(config, field_name, value)
    config.validate()
    return config


def _corpus_documents(config: RunConfig):
    """ALL-TEXT documents for every workbook in the configured repository."""
    if not config.repo_path or not Path(config.repo_path).is_dir():
        raise ConfigError(f"repository path not found: {config.repo_path!r}")
    stops = (
        StopWordList.from_path(config.stop_list_path)
        if config.stop_list_path
        else default_stop_words()
    )
    loaded = load_repository(config.repo_path)
    for err in loaded.errors:
        log.warning("skipping %s: %s (%s)", err.path, err.error, err.message)
    docs = [
        build_document(wb, ALL_TEXT, stops)
        for wb in sorted(loaded.workbooks, key=lambda wb: wb.id)
    ]
    if config.exclusion_list_path:
        try:
            lines = Path(config.exclusion_list_path).read_text("utf-8").splitlines()
        except OSError as exc:
            raise IoError(
                f"cannot read exclusion list {config.exclusion_list_path}: {exc}"
            ) from exc
        excluded = {
            line.strip() for line in lines if line.strip() and not line.startswith("#")
        }
        docs = [d for d in docs if d.workbook_id not in excluded]
    return docs


def _build_scorers(config: RunConfig, docs, seed: int) -> dict:
    docs_by_id = {d.workbook_id: d for d in docs}
    scorers: dict = {}
    tfidf = fit_tfidf(docs)
    if "tfidf" in config.eval_models:
        scorers["tfidf"] = tfidf_scorer(tfidf, docs_by_id)
    if "lsi" in config.eval_models:
        matrix = tfidf_matrix(tfidf, docs)
        max_rank = min(matrix.shape)
        for k in config.lsi_k_grid:
            if k > max_rank:
                log.warning("skipping lsi_k%d: rank exceeds corpus size", k)
                continue
            model = fit_lsi(matrix, k=k, seed=seed)
            scorers[f"lsi_k{k}"] = lsi_scorer(model, tfidf, docs_by_id)
    if "lda" in config.eval_models:
        for k in config.lda_k_grid:
            model = fit_lda(
                docs, k=k, seed=seed, iterations=config.lda_iterations
            )
            scorers[f"lda_k{k}"] = lda_scorer(model, docs_by_id, seed)
    if "embedding" in config.eval_models:
        if not config.word_vectors_path:
            raise ConfigError(
                "eval_models includes 'embedding' but word_vectors_path is unset"
            )
        table = load_word_vectors(config.word_vectors_path)
        scorers[f"emb_d{table.dimension}"] = embedding_scorer(table, docs_by_id)
    return scorers


def cmd_build(args) -> int:
    config = _load_base_config(args)
    if not config.repo_path or not Path(config.repo_path).is_dir():
        raise ConfigError(f"repository path not found: {config.repo_path!r}")
    if not config.bundle_path:
        raise ConfigError("bundle_path is required for build")
    config.require_seed()
    _, report = build_index(config.repo_path, config, output_path=config.bundle_path)
    print(json.dumps(report, sort_keys=True, indent=2))
    return EXIT_OK


def cmd_triplets(args) -> int:
    config = _load_base_config(args)
    seed = config.require_seed()
    docs = _corpus_documents(config)
    triplets = sample_triplets(docs, n=config.n_triplets, seed=seed)
    write_triplets_csv(triplets, args.out)
    print(f"wrote {len(triplets)} triplets to {args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    config = _load_base_config(args)
    seed = config.require_seed()
    docs = _corpus_documents(config)
    if args.triplets:
        triplets = load_triplets_csv(args.triplets)
    else:
        triplets = sample_triplets(docs, n=config.n_triplets, seed=seed)
    if args.judgements:
        judgements = load_judgements_csv(args.judgements)
        gold = load_gold_csv(args.gold) if args.gold else None
    else:
        log.info(
            "no judgement file given; simulating %d raters at accuracy %.2f",
            config.n_raters,
            config.rater_accuracy,
        )
        judgements, gold = synthetic_judgements(
            triplets, config.n_raters, config.rater_accuracy, seed
        )
    scorers = _build_scorers(config, docs, seed)
    report = agreement_report(triplets, judgements, scorers, gold)
    write_report(report, args.out)
    print(format_report_table(report))
    print(f"report written to {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    config = _load_base_config(args)
    if not config.bundle_path or not Path(config.bundle_path).is_dir():
        raise ConfigError(f"bundle path not found: {config.bundle_path!r}")
    bundle = load_bundle(config.bundle_path)
    log.info("serving %d workbooks on %s:%d", len(bundle.workbooks), config.host, config.port)
    serve(
        bundle,
        host=config.host,
        port=config.port,
        cors_origin=config.cors_origin,
        log_level=os.environ.get("VIZREC_LOG_LEVEL", "info").lower(),
    )
    return EXIT_OK


def cmd_search(args) -> int:
    config = _load_base_config(args)
    if not config.bundle_path or not Path(config.bundle_path).is_dir():
        raise ConfigError(f"bundle path not found: {config.bundle_path!r}")
    bundle = load_bundle(config.bundle_path)
    results = bundle.search(args.query, limit=args.limit)
    if not results:
        print("no matches")
        return EXIT_OK
    print(f"{'rank':<5} {'score':<8} {'id':<14} {'title':<32} author")
    for rank, row in enumerate(results, start=1):
        wb = row["workbook"]
        print(
            f"{rank:<5} {row['score']:<8.4f} {wb['id']:<14} "
            f"{wb['title'][:32]:<32} {wb['author']}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vizrec",
        description="Content-based recommendations for visualization workbook repositories.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="run configuration file (TOML-style)")
        p.add_argument("--repo", help="repository root (overrides config)")
        p.add_argument("--bundle", help="index bundle directory (overrides config)")
        p.add_argument("--seed", type=int, help="random seed (overrides config)")

    p_build = sub.add_parser("build", help="build an index bundle from a repository")
    add_common(p_build)
    p_build.set_defaults(func=cmd_build)

    p_eval = sub.add_parser("eval", help="run the triplet agreement evaluation")
    add_common(p_eval)
    p_eval.add_argument("--triplets", help="triplet CSV (default: sample fresh)")
    p_eval.add_argument("--judgements", help="judgement CSV (default: synthesize)")
    p_eval.add_argument("--gold", help="gold-label CSV (with --judgements)")
    p_eval.add_argument("--out", default="agreement_report.json", help="report path")
    p_eval.set_defaults(func=cmd_eval)

    p_serve = sub.add_parser("serve", help="serve a bundle over HTTP")
    add_common(p_serve)
    p_serve.add_argument("--host", help="bind host (overrides config)")
    p_serve.add_argument("--port", type=int, help="bind port (overrides config)")
    p_serve.set_defaults(func=cmd_serve)

    p_search = sub.add_parser("search", help="search a bundle from the console")
    add_common(p_search)
    p_search.add_argument("query", help="search terms")
    p_search.add_argument("--limit", type=int, default=24)
    p_search.set_defaults(func=cmd_search)

    p_triplets = sub.add_parser("triplets", help="emit a sampled triplet CSV")
    add_common(p_triplets)
    p_triplets.add_argument("--out", default="triplets.csv", help="output CSV path")
    p_triplets.set_defaults(func=cmd_triplets)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except InsufficientCorpus as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (IoError, BundleFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except VizrecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
