"""Model answers to two-alternative forced-choice triplets.

A scorer is any ``(doc_id, doc_id) -> similarity`` callable; the model's
choice is whichever alternative scores higher against the reference, ties
going to A with a recorded flag. Factories below wrap each document model
behind that one interface, caching per-document representations.
"""

from __future__ import annotations

from dataclasses import dataclass
from hashlib import blake2b
from typing import Callable, Mapping

from ..errors import ScoringFailure, VizrecError
from ..models import (
    LdaModel,
    LsiModel,
    TfIdfModel,
    WordVectorTable,
    embed_document,
    lda_infer,
    lsi_project,
    tfidf_vector,
)
from ..similarity import cosine_similarity, jsd_similarity
from ..text_pipeline import Document
from .triplets import Triplet

Scorer = Callable[[str, str], float]


@dataclass(frozen=True)
class TwoAfcChoice:
    triplet_id: str
    choice: str  # "A" | "B"
    tie: bool
    score_a: float
    score_b: float


def model_2afc(scorer: Scorer, triplet: Triplet) -> TwoAfcChoice:
    """Pick the alternative scoring higher against the reference."""
    try:
        score_a = float(scorer(triplet.reference, triplet.alt_a))
        score_b = float(scorer(triplet.reference, triplet.alt_b))
    except VizrecError as exc:
        raise ScoringFailure(f"triplet {triplet.triplet_id}: {exc}") from exc
    tie = score_a == score_b
    return TwoAfcChoice(
        triplet_id=triplet.triplet_id,
        choice="A" if score_a >= score_b else "B",
        tie=tie,
        score_a=score_a,
        score_b=score_b,
    )


def _require(docs_by_id: Mapping[str, Document], doc_id: str) -> Document:
    doc = docs_by_id.get(doc_id)
    if doc is None:
        raise ScoringFailure(f"unknown document id {doc_id!r}")
    return doc


def tfidf_scorer(model: TfIdfModel, docs_by_id: Mapping[str, Document]) -> Scorer:
    cache: dict = {}

    def vector(doc_id: str):
        if doc_id not in cache:
            cache[doc_id] = tfidf_vector(model, _require(docs_by_id, doc_id))
        return cache[doc_id]

    return lambda a, b: cosine_similarity(vector(a), vector(b))


def lsi_scorer(
    model: LsiModel, tfidf: TfIdfModel, docs_by_id: Mapping[str, Document]
) -> Scorer:
    cache: dict = {}

    def vector(doc_id: str):
        if doc_id not in cache:
            cache[doc_id] = lsi_project(
                model, tfidf_vector(tfidf, _require(docs_by_id, doc_id))
            )
        return cache[doc_id]

    return lambda a, b: cosine_similarity(vector(a), vector(b))


def _doc_seed(base_seed: int, doc_id: str) -> int:
    digest = blake2b(doc_id.encode("utf-8"), digest_size=8).digest()
    return (base_seed ^ int.from_bytes(digest, "little")) & 0x7FFFFFFFFFFFFFFF


def lda_scorer(
    model: LdaModel, docs_by_id: Mapping[str, Document], seed: int
) -> Scorer:
    """Fold-in inference per document (seeded per id, so order-independent)."""
    cache: dict = {}

    def distribution(doc_id: str):
        if doc_id not in cache:
            cache[doc_id] = lda_infer(
                model, _require(docs_by_id, doc_id), seed=_doc_seed(seed, doc_id)
            )
        return cache[doc_id]

    return lambda a, b: jsd_similarity(distribution(a), distribution(b))


def embedding_scorer(
    table: WordVectorTable, docs_by_id: Mapping[str, Document]
) -> Scorer:
    cache: dict = {}

    def vector(doc_id: str):
        if doc_id not in cache:
            cache[doc_id] = embed_document(table, _require(docs_by_id, doc_id))
        return cache[doc_id]

    return lambda a, b: cosine_similarity(vector(a), vector(b))
