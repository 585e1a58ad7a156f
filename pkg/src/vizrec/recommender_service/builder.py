"""Offline index construction: repository -> serve-ready bundle.

Stages: parse every workbook file, build full-text and column-name documents,
flag workbooks excluded from recommendation (non-English text, no visual
marks, fewer than 10 relevant words — they stay browsable in metadata), fit
TF-IDF plus one topic model per facet profile, score all pairs, band the
scores into per-facet neighbor lists, group near-duplicates, and derive the
tag table and inverted search index.

Everything downstream of the seed is deterministic, so rebuilding from the
same inputs yields a byte-identical bundle. The optional MinHash prefilter
restricts the near-duplicate (versions) scoring to LSH candidate pairs; the
related and similar-data facets always score all pairs because band-relevant
neighbors there need not share raw vocabulary.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import fields
from pathlib import Path

import numpy as np

from ..config import RunConfig
from ..errors import EmptyCorpus
from ..models import fit_lda, fit_tfidf, tfidf_vector
from ..similarity import (
    Facet,
    FacetConfig,
    SimilarityScore,
    default_facet_configs,
    group_near_duplicates,
    jsd_matrix,
    minhash_candidates,
    minhash_signature,
    top_k_neighbors,
)
from ..spec_ingest import load_repository
from ..text_pipeline import (
    ALL_TEXT,
    COLUMNS_ONLY,
    StopWordList,
    build_document,
    default_stop_words,
    eligible_for_recommendation,
)
from .bundle import (
    IndexBundle,
    TagEntry,
    WorkbookMeta,
    TAG_COUNT,
    save_bundle,
)

EXCLUDE_NON_ENGLISH = "non_english"
EXCLUDE_NO_MARKS = "no_marks"
EXCLUDE_TOO_FEW_WORDS = "too_few_words"


def _facet_configs_from(config: RunConfig) -> dict:
    defaults = default_facet_configs()
    return {
        Facet.RELATED: FacetConfig(
            Facet.RELATED, config.related_low, config.related_high, ALL_TEXT
        ),
        Facet.VERSIONS: FacetConfig(
            Facet.VERSIONS, config.versions_low, config.versions_high, ALL_TEXT
        ),
        Facet.SIMILAR_DATA: FacetConfig(
            Facet.SIMILAR_DATA,
            config.similar_data_low,
            config.similar_data_high,
            defaults[Facet.SIMILAR_DATA].profile,
        ),
    }


def _config_json(config: RunConfig) -> dict:
    out = {}
    for f in fields(RunConfig):
        value = getattr(config, f.name)
        out[f.name] = list(value) if isinstance(value, tuple) else value
    return out


def _pair_scores(
    ids: list[str],
    similarity: np.ndarray,
    model_tag: str,
    allowed_pairs: set | None = None,
) -> list[SimilarityScore]:
    scores = []
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            if allowed_pairs is not None and (ids[i], ids[j]) not in allowed_pairs:
                continue
            scores.append(
                SimilarityScore(
                    a=ids[i],
                    b=ids[j],
                    model_tag=model_tag,
                    value=float(similarity[i, j]),
                )
            )
    return scores


def _neighbor_lists(
    ids: list[str],
    scores: list[SimilarityScore],
    facet_config: FacetConfig,
    k: int,
    eligible: set,
) -> dict:
    by_endpoint: dict = defaultdict(list)
    for score in scores:
        by_endpoint[score.a].append(score)
        by_endpoint[score.b].append(score)
    return {
        wid: top_k_neighbors(wid, by_endpoint.get(wid, ()), facet_config, k, eligible)
        for wid in ids
    }


def build_index(repo_path, config: RunConfig, output_path=None):
    """Build the bundle; returns (IndexBundle, build report dict).

    When ``output_path`` is given the bundle (including the report as
    ``report.json``) is also written there.
    """
    seed = config.require_seed()
    config.validate()
    stops = (
        StopWordList.from_path(config.stop_list_path)
        if config.stop_list_path
        else default_stop_words()
    )
    loaded = load_repository(repo_path)
    workbooks = sorted(loaded.workbooks, key=lambda wb: wb.id)

    all_docs = {wb.id: build_document(wb, ALL_TEXT, stops) for wb in workbooks}
    col_docs = {wb.id: build_document(wb, COLUMNS_ONLY, stops) for wb in workbooks}

    metas: dict = {}
    excluded_counts = {
        EXCLUDE_NON_ENGLISH: 0,
        EXCLUDE_NO_MARKS: 0,
        EXCLUDE_TOO_FEW_WORDS: 0,
    }
    for wb in workbooks:
        reasons = []
        if wb.language_tag != "en":
            reasons.append(EXCLUDE_NON_ENGLISH)
        if not any(s.has_marks for s in wb.sheets):
            reasons.append(EXCLUDE_NO_MARKS)
        if not eligible_for_recommendation(all_docs[wb.id]):
            reasons.append(EXCLUDE_TOO_FEW_WORDS)
        for reason in reasons:
            excluded_counts[reason] += 1
        metas[wb.id] = WorkbookMeta(
            workbook_id=wb.id,
            title=wb.title,
            author=wb.author,
            modified_date=wb.modified_date,
            language=wb.language_tag,
            sheets=tuple((s.sheet_name, s.kind) for s in wb.sheets),
            columns=tuple(
                cap for ds in wb.datasources for cap in ds.column_captions
            ),
            word_count=all_docs[wb.id].total_tokens,
            eligible=not reasons,
            exclusion_reasons=tuple(reasons),
        )

    eligible_ids = sorted(wid for wid, meta in metas.items() if meta.eligible)
    if not eligible_ids:
        raise EmptyCorpus(
            "no workbook is eligible for recommendation "
            "(all were excluded by language, marks, or word-count rules)"
        )
    eligible_docs = [all_docs[wid] for wid in eligible_ids]

    # Fitted over every parsed workbook (not just eligible ones) because this
    # model backs search, tags, and the inverted index, which must still reach
    # workbooks that are excluded from recommendations.
    searchable_docs = [all_docs[wid] for wid in sorted(all_docs) if all_docs[wid].counts]
    tfidf = fit_tfidf(searchable_docs)
    lda_all = fit_lda(
        eligible_docs, k=config.lda_k, seed=seed, iterations=config.lda_iterations
    )
    sim_all = 1.0 - jsd_matrix(lda_all.doc_topic)
    np.fill_diagonal(sim_all, 1.0)

    facet_configs = _facet_configs_from(config)
    all_text_scores = _pair_scores(eligible_ids, sim_all, "lda_all_text")

    if config.minhash_prefilter:
        signatures = [
            minhash_signature(all_docs[wid], seed)
            for wid in eligible_ids
            if all_docs[wid].counts
        ]
        candidate_pairs = minhash_candidates(
            signatures, threshold=config.minhash_threshold
        )
        versions_scores = [
            s
            for s in all_text_scores
            if (min(s.a, s.b), max(s.a, s.b)) in candidate_pairs
        ]
    else:
        versions_scores = all_text_scores

    # Similar-data compares column-name documents; workbooks without column
    # text would all collapse onto the topic prior, so they sit this facet out.
    col_ids = sorted(
        wid for wid in eligible_ids if col_docs[wid].total_tokens > 0
    )
    lda_models = {"all_text": lda_all}
    similar_data_scores: list[SimilarityScore] = []
    if len(col_ids) >= 2:
        col_eligible_docs = [col_docs[wid] for wid in col_ids]
        lda_cols = fit_lda(
            col_eligible_docs,
            k=config.lda_k,
            seed=seed,
            iterations=config.lda_iterations,
        )
        lda_models["columns_only"] = lda_cols
        sim_cols = 1.0 - jsd_matrix(lda_cols.doc_topic)
        np.fill_diagonal(sim_cols, 1.0)
        similar_data_scores = _pair_scores(col_ids, sim_cols, "lda_columns_only")

    eligible_set = set(eligible_ids)
    neighbors = {
        Facet.RELATED: _neighbor_lists(
            eligible_ids,
            all_text_scores,
            facet_configs[Facet.RELATED],
            config.neighbor_k,
            eligible_set,
        ),
        Facet.VERSIONS: _neighbor_lists(
            eligible_ids,
            versions_scores,
            facet_configs[Facet.VERSIONS],
            config.neighbor_k,
            eligible_set,
        ),
        Facet.SIMILAR_DATA: _neighbor_lists(
            col_ids,
            similar_data_scores,
            facet_configs[Facet.SIMILAR_DATA],
            config.neighbor_k,
            set(col_ids),
        ),
    }

    dates = {wid: metas[wid].modified_date for wid in eligible_ids}
    groups = group_near_duplicates(
        versions_scores, dates, threshold=config.versions_low
    )

    # Tags and the inverted index cover every parsed workbook (excluded ones
    # stay searchable); weights come from the fitted TF-IDF space.
    tag_weight: dict = defaultdict(float)
    inverted: dict = defaultdict(list)
    for wid in sorted(all_docs):
        doc = all_docs[wid]
        if not doc.counts:
            continue
        for token in sorted(doc.counts):
            inverted[token].append(wid)
        vec = tfidf_vector(tfidf, doc)
        for idx, value in zip(vec.indices, vec.values):
            tag_weight[tfidf.vocabulary.index_to_token[int(idx)]] += float(value)
    top_tags = sorted(tag_weight.items(), key=lambda kv: (-kv[1], kv[0]))[:TAG_COUNT]
    tags = [
        TagEntry(tag=token, weight=weight, workbook_ids=tuple(inverted[token]))
        for token, weight in top_tags
    ]

    report = {
        "parsed": len(workbooks),
        "load_errors": [
            {"path": str(err.path), "error": err.error, "message": err.message}
            for err in loaded.errors
        ],
        "excluded": excluded_counts,
        "eligible": len(eligible_ids),
        "column_documents": len(col_ids),
        "groups": len(groups),
        "tags": len(tags),
        "seed": seed,
    }
    manifest = {
        "seed": seed,
        "config": _config_json(config),
        "counts": {
            "workbooks": len(workbooks),
            "eligible": len(eligible_ids),
            "groups": len(groups),
        },
    }
    bundle = IndexBundle(
        manifest=manifest,
        workbooks=metas,
        documents={
            "all_text": all_docs,
            "columns_only": {wid: col_docs[wid] for wid in sorted(col_docs)},
        },
        tfidf=tfidf,
        lda_models=lda_models,
        facet_configs=facet_configs,
        neighbors=neighbors,
        groups=groups,
        tags=tags,
        inverted={tok: tuple(ids) for tok, ids in sorted(inverted.items())},
        stop_words=stops,
    )
    if output_path is not None:
        save_bundle(bundle, output_path)
        report_path = Path(output_path) / "report.json"
        report_path.write_text(
            json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    return bundle, report
