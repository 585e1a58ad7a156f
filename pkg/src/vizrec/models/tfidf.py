"""TF-IDF weighting with ln(N/df) inverse document frequency.

The idf form has no +1 smoothing, so a term occurring in every document gets
weight zero and vanishes from the vectors entirely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ..text_pipeline import Document
from .vocabulary import SparseVector, Vocabulary, build_vocabulary
from . import container


@dataclass(frozen=True)
class TfIdfModel:
    vocabulary: Vocabulary
    idf: np.ndarray  # float64, aligned with vocabulary indices

    def idf_of(self, token: str) -> float:
        i = self.vocabulary.token_to_index.get(token)
        return float(self.idf[i]) if i is not None else 0.0


def fit_tfidf(docs: list[Document], min_df: int = 1) -> TfIdfModel:
    vocab = build_vocabulary(docs, min_df=min_df)
    with np.errstate(divide="ignore"):
        idf = np.log(vocab.n_documents / vocab.df_array.astype(np.float64))
    return TfIdfModel(vocabulary=vocab, idf=idf)


def tfidf_vector(model: TfIdfModel, doc: Document) -> SparseVector:
    """count(t) * idf(t), L2-normalized; OOV and zero-idf terms drop out."""
    t2i = model.vocabulary.token_to_index
    pairs = sorted(
        (t2i[t], c) for t, c in doc.counts.items() if t in t2i
    )
    if not pairs:
        return SparseVector.empty()
    idx = np.array([i for i, _ in pairs], dtype=np.int64)
    val = np.array([c for _, c in pairs], dtype=np.float64) * model.idf[idx]
    nz = val != 0.0
    idx, val = idx[nz], val[nz]
    if idx.size == 0:
        return SparseVector.empty()
    val = val / np.sqrt(np.dot(val, val))
    return SparseVector(idx, val)


def tfidf_matrix(model: TfIdfModel, docs: list[Document]) -> sparse.csr_matrix:
    """Stack tfidf_vector rows into an n_docs x |V| CSR matrix."""
    indptr = [0]
    indices: list[np.ndarray] = []
    data: list[np.ndarray] = []
    for doc in docs:
        vec = tfidf_vector(model, doc)
        indices.append(vec.indices)
        data.append(vec.values)
        indptr.append(indptr[-1] + vec.nnz)
    return sparse.csr_matrix(
        (
            np.concatenate(data) if data else np.empty(0),
            np.concatenate(indices) if indices else np.empty(0, dtype=np.int64),
            np.array(indptr, dtype=np.int64),
        ),
        shape=(len(docs), len(model.vocabulary)),
    )


def save_tfidf(model: TfIdfModel, path) -> None:
    container.write_container(
        path,
        {
            "tokens": container.json_section(model.vocabulary.index_to_token),
            "df": model.vocabulary.df_array,
            "idf": model.idf,
            "meta": container.json_section(
                {
                    "n_documents": model.vocabulary.n_documents,
                    "min_df": model.vocabulary.min_df,
                }
            ),
        },
        kind="tfidf",
    )


def load_tfidf(path) -> TfIdfModel:
    sections = container.read_container(path, kind="tfidf")
    tokens = container.json_value(sections["tokens"])
    df = sections["df"]
    meta = container.json_value(sections["meta"])
    vocab = Vocabulary(
        token_to_index={t: i for i, t in enumerate(tokens)},
        index_to_token=list(tokens),
        document_frequency={t: int(df[i]) for i, t in enumerate(tokens)},
        n_documents=int(meta["n_documents"]),
        min_df=int(meta["min_df"]),
    )
    return TfIdfModel(vocabulary=vocab, idf=sections["idf"])
