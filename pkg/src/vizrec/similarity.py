"""Pairwise similarity, facet banding, near-duplicate grouping, MinHash.

Measures: cosine over sparse/dense vectors, and base-2 Jensen-Shannon
divergence over topic distributions (bounded in [0,1]); ``jsd_similarity`` is
its complement so every similarity lives on the same 0-1 scale.

Facets carve that scale into recommendation bands: RELATED [0.65, 0.90) and
VERSIONS [0.90, 1.0] on full-text documents, SIMILAR_DATA [0.90, 1.0] on
column-name documents. Bands are half-open except at the top of the scale, so
RELATED and VERSIONS partition [0.65, 1.0].

MinHash (128 hashes, 16 bands x 8 rows) proposes candidate near-duplicate
pairs cheaply before exact scoring.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from hashlib import blake2b
from typing import Container, Iterable, Mapping

import numpy as np

from .errors import (
    DegenerateInput,
    DimensionMismatch,
    EmptyDocument,
    ZeroVector,
)
from .models.vocabulary import SparseVector
from .models.lda import TopicDistribution
from .text_pipeline import ALL_TEXT, COLUMNS_ONLY, Document, FeatureProfile

NEAR_DUPLICATE_THRESHOLD = 0.90
MINHASH_N_HASHES = 128
MINHASH_BANDS = 16
MINHASH_ROWS = 8

_U64 = np.uint64
_SPLITMIX_GAMMA = _U64(0x9E3779B97F4A7C15)


class Facet(enum.Enum):
    RELATED = "related"
    VERSIONS = "versions"
    SIMILAR_DATA = "similar-data"

    @classmethod
    def parse(cls, text: str) -> "Facet":
        for member in cls:
            if member.value == text:
                return member
        raise KeyError(text)


@dataclass(frozen=True)
class SimilarityScore:
    a: str
    b: str
    model_tag: str
    value: float


@dataclass(frozen=True)
class FacetConfig:
    facet: Facet
    low: float
    high: float
    profile: FeatureProfile

    def contains(self, value: float) -> bool:
        """Band membership: [low, high), upper-inclusive at the top of scale."""
        if self.high >= 1.0:
            return self.low <= value <= self.high
        return self.low <= value < self.high


def default_facet_configs() -> dict:
    return {
        Facet.RELATED: FacetConfig(Facet.RELATED, 0.65, 0.90, ALL_TEXT),
        Facet.VERSIONS: FacetConfig(Facet.VERSIONS, 0.90, 1.0, ALL_TEXT),
        Facet.SIMILAR_DATA: FacetConfig(Facet.SIMILAR_DATA, 0.90, 1.0, COLUMNS_ONLY),
    }


@dataclass(frozen=True)
class NeighborList:
    workbook_id: str
    facet: Facet
    neighbors: tuple  # ((neighbor_id, value), ...) descending by value


@dataclass(frozen=True)
class DuplicateGroup:
    group_id: str
    members: tuple  # sorted workbook ids, len >= 2
    representative_id: str


@dataclass(frozen=True)
class MinHashSignature:
    workbook_id: str
    values: np.ndarray  # (128,) uint64 min-hash values
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=_U64))
        if self.values.shape != (MINHASH_N_HASHES,):
            raise DimensionMismatch(
                f"signature must have {MINHASH_N_HASHES} values, "
                f"got {self.values.shape}"
            )


# ---------------------------------------------------------------------------
# measures


def _dense(v) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected 1-d vector, got shape {arr.shape}")
    return arr


def cosine_similarity(u, v) -> float:
    """dot(u,v)/(|u||v|), clamped to [-1,1]; accepts sparse or dense vectors."""
    if isinstance(u, SparseVector) and isinstance(v, SparseVector):
        nu, nv = u.norm(), v.norm()
        if nu == 0.0 or nv == 0.0:
            raise ZeroVector("cosine undefined for a zero vector")
        raw = u.dot(v) / (nu * nv)
    else:
        du, dv = _dense(u), _dense(v)
        if du.shape != dv.shape:
            raise DimensionMismatch(f"shape {du.shape} vs {dv.shape}")
        nu, nv = float(np.linalg.norm(du)), float(np.linalg.norm(dv))
        if nu == 0.0 or nv == 0.0:
            raise ZeroVector("cosine undefined for a zero vector")
        raw = float(du @ dv) / (nu * nv)
    return min(1.0, max(-1.0, raw))


def _as_distribution(p) -> np.ndarray:
    if isinstance(p, TopicDistribution):
        return p.probabilities
    return _dense(p)


def jsd(p, q) -> float:
    """Base-2 Jensen-Shannon divergence in [0,1], with 0*log(0) := 0."""
    dp, dq = _as_distribution(p), _as_distribution(q)
    if dp.shape != dq.shape:
        raise DimensionMismatch(f"shape {dp.shape} vs {dq.shape}")
    m = 0.5 * (dp + dq)
    out = 0.0
    for dist in (dp, dq):
        mask = dist > 0.0
        out += 0.5 * float(np.sum(dist[mask] * np.log2(dist[mask] / m[mask])))
    return min(1.0, max(0.0, out))


def jsd_similarity(p, q) -> float:
    """1 - jsd(p, q), in [0,1]."""
    return 1.0 - jsd(p, q)


def jsd_matrix(theta: np.ndarray, chunk: int = 64) -> np.ndarray:
    """All-pairs base-2 JSD over rows of a row-stochastic matrix.

    Uses JSD(p,q) = H((p+q)/2) - (H(p)+H(q))/2; processed in row chunks to
    bound memory on large corpora.
    """
    rows = np.asarray(theta, dtype=np.float64)
    n = rows.shape[0]

    def entropy(x):
        safe = np.where(x > 0.0, x, 1.0)
        return -np.sum(x * np.log2(safe), axis=-1)

    h = entropy(rows)
    out = np.zeros((n, n), dtype=np.float64)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        m = 0.5 * (rows[start:stop, None, :] + rows[None, :, :])
        out[start:stop] = entropy(m) - 0.5 * (h[start:stop, None] + h[None, :])
    np.fill_diagonal(out, 0.0)
    return np.clip(out, 0.0, 1.0)


# ---------------------------------------------------------------------------
# facet neighbor lists and near-duplicate groups


def top_k_neighbors(
    source: str,
    scores: Iterable[SimilarityScore],
    facet: FacetConfig,
    k: int,
    eligible: Container[str] | None = None,
) -> NeighborList:
    """Band-filtered, descending top-k recommendations for one workbook.

    ``eligible`` restricts which endpoints may appear (documents below the
    minimum word count are excluded from recommendation entirely); ``None``
    admits every id.
    """
    if eligible is not None and source not in eligible:
        return NeighborList(workbook_id=source, facet=facet.facet, neighbors=())
    kept = []
    for score in scores:
        if source == score.a:
            other = score.b
        elif source == score.b:
            other = score.a
        else:
            continue
        if other == source:
            continue
        if eligible is not None and other not in eligible:
            continue
        if facet.contains(score.value):
            kept.append((other, score.value))
    kept.sort(key=lambda pair: (-pair[1], pair[0]))
    return NeighborList(
        workbook_id=source, facet=facet.facet, neighbors=tuple(kept[:k])
    )


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # deterministic: smaller id becomes the root
            lo, hi = sorted((ra, rb))
            self.parent[hi] = lo


def group_near_duplicates(
    scores: Iterable[SimilarityScore],
    modified_dates: Mapping[str, str | None] | None = None,
    threshold: float = NEAR_DUPLICATE_THRESHOLD,
) -> list[DuplicateGroup]:
    """Connected components over pairs scoring >= threshold; singletons omitted.

    The representative is the member with the latest modified date (ISO-8601
    string order), ties broken by smallest id; missing dates sort earliest.
    """
    dates = modified_dates or {}
    uf = _UnionFind()
    seen_edge = False
    for score in scores:
        if score.a != score.b and score.value >= threshold:
            uf.union(score.a, score.b)
            seen_edge = True
    if not seen_edge:
        return []
    components: dict = {}
    for node in uf.parent:
        components.setdefault(uf.find(node), []).append(node)
    groups = []
    for members in components.values():
        if len(members) < 2:
            continue
        members = sorted(members)
        representative = max(members, key=lambda m: (dates.get(m) or "", _NegStr(m)))
        groups.append(
            DuplicateGroup(
                group_id=f"grp-{members[0]}",
                members=tuple(members),
                representative_id=representative,
            )
        )
    groups.sort(key=lambda g: g.group_id)
    return groups


class _NegStr(str):
    """Reverses string order so max() tie-breaks toward the smallest id."""

    def __lt__(self, other):
        return str.__gt__(self, other)

    def __gt__(self, other):
        return str.__lt__(self, other)


# ---------------------------------------------------------------------------
# MinHash / LSH banding


def _splitmix64_stream(seed: int, n: int) -> np.ndarray:
    out = np.empty(n, dtype=_U64)
    state = _U64(seed & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):  # wraparound is the point
        for i in range(n):
            state = state + _SPLITMIX_GAMMA
            out[i] = _mix64(state)
    return out


def _mix64(x):
    with np.errstate(over="ignore"):  # wraparound is the point
        z = x
        z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
        return z ^ (z >> _U64(31))


def _token_base_hashes(tokens: Iterable[str]) -> np.ndarray:
    return np.array(
        [
            int.from_bytes(blake2b(t.encode("utf-8"), digest_size=8).digest(), "little")
            for t in sorted(tokens)
        ],
        dtype=_U64,
    )


def minhash_signature(doc: Document, seed: int) -> MinHashSignature:
    """128 min-values of a seeded 64-bit hash family over the token set.

    Counts are ignored; deterministic per (token set, seed).
    """
    if not doc.counts:
        raise EmptyDocument(f"cannot sign empty document: {doc.workbook_id}")
    base = _token_base_hashes(doc.counts)
    keys = _splitmix64_stream(seed, MINHASH_N_HASHES)
    table = _mix64(base[None, :] ^ keys[:, None])
    return MinHashSignature(
        workbook_id=doc.workbook_id, values=table.min(axis=1), seed=seed
    )


def estimated_jaccard(a: MinHashSignature, b: MinHashSignature) -> float:
    if a.seed != b.seed:
        raise DegenerateInput(
            f"signatures use different seeds: {a.seed} vs {b.seed}"
        )
    return float(np.mean(a.values == b.values))


def minhash_candidates(
    signatures: Iterable[MinHashSignature],
    threshold: float | None = None,
) -> set:
    """LSH-banded candidate pairs (16 bands x 8 rows), as sorted id tuples.

    When ``threshold`` is given, banded pairs are additionally required to
    have signature-estimated Jaccard >= threshold.
    """
    sigs = list(signatures)
    by_id = {s.workbook_id: s for s in sigs}
    buckets: dict = {}
    for sig in sigs:
        for band in range(MINHASH_BANDS):
            chunk = sig.values[band * MINHASH_ROWS : (band + 1) * MINHASH_ROWS]
            buckets.setdefault((band, chunk.tobytes()), []).append(sig.workbook_id)
    pairs: set = set()
    for ids in buckets.values():
        if len(ids) < 2:
            continue
        ids = sorted(set(ids))
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                pairs.add((ids[i], ids[j]))
    if threshold is not None:
        pairs = {
            (a, b)
            for a, b in pairs
            if estimated_jaccard(by_id[a], by_id[b]) >= threshold
        }
    return pairs
