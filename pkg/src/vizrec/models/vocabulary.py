"""Corpus vocabulary and the sparse vector type shared by all models."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyCorpus
from ..text_pipeline import Document


@dataclass(frozen=True)
class SparseVector:
    """One row of a sparse document-term matrix.

    Indices are strictly increasing and values are nonzero; the empty vector
    has zero entries.
    """

    indices: np.ndarray  # int64, strictly increasing
    values: np.ndarray  # float64, nonzero

    def __post_init__(self):
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.indices.shape != self.values.shape:
            raise ValueError("indices and values must align")
        if self.indices.size and np.any(np.diff(self.indices) <= 0):
            raise ValueError("indices must be strictly increasing")
        if self.values.size and np.any(self.values == 0.0):
            raise ValueError("values must be nonzero")

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.values, self.values)))

    def dot(self, other: "SparseVector") -> float:
        # merge over sorted index arrays
        ia, ib = self.indices, other.indices
        common, ca, cb = np.intersect1d(ia, ib, assume_unique=True, return_indices=True)
        if common.size == 0:
            return 0.0
        return float(np.dot(self.values[ca], other.values[cb]))

    def to_dense(self, dim: int) -> np.ndarray:
        out = np.zeros(dim, dtype=np.float64)
        out[self.indices] = self.values
        return out

    @classmethod
    def empty(cls) -> "SparseVector":
        return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64))


@dataclass(frozen=True)
class Vocabulary:
    """Token index with per-token document frequencies."""

    token_to_index: dict[str, int]
    index_to_token: list[str]
    document_frequency: dict[str, int]
    n_documents: int
    min_df: int = 1
    _df_array: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._df_array is None:
            df = np.array(
                [self.document_frequency[t] for t in self.index_to_token], dtype=np.int64
            )
            object.__setattr__(self, "_df_array", df)

    def __len__(self) -> int:
        return len(self.index_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_index

    @property
    def df_array(self) -> np.ndarray:
        return self._df_array


def build_vocabulary(docs: list[Document], min_df: int = 1) -> Vocabulary:
    """Index all tokens with document frequency >= min_df, lexicographically."""
    if not docs:
        raise EmptyCorpus("cannot build a vocabulary from zero documents")
    df: dict[str, int] = {}
    for doc in docs:
        for token in doc.counts:
            df[token] = df.get(token, 0) + 1
    kept = sorted(t for t, c in df.items() if c >= min_df)
    return Vocabulary(
        token_to_index={t: i for i, t in enumerate(kept)},
        index_to_token=kept,
        document_frequency={t: df[t] for t in kept},
        n_documents=len(docs),
        min_df=min_df,
    )
