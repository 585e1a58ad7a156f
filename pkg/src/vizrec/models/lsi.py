"""Latent semantic indexing via seeded randomized truncated SVD.

The randomized scheme (Gaussian test matrix, oversampling 10, four power
iterations with QR re-orthonormalization) avoids densifying the document-term
matrix; the dense LAPACK SVD is reserved for small-instance test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ..errors import DimensionMismatch, RankTooLarge
from .vocabulary import SparseVector
from . import container

OVERSAMPLE = 10
POWER_ITERATIONS = 4


@dataclass(frozen=True)
class LsiModel:
    k: int
    projection: np.ndarray  # k x |V|, orthonormal rows
    singular_values: np.ndarray  # k, descending


def _as_csr(tfidf_rows, dim: int | None = None) -> sparse.csr_matrix:
    if sparse.issparse(tfidf_rows):
        return tfidf_rows.tocsr()
    rows = list(tfidf_rows)
    if dim is None:
        dim = max((int(r.indices[-1]) + 1 for r in rows if r.nnz), default=0)
    indptr = np.cumsum([0] + [r.nnz for r in rows])
    return sparse.csr_matrix(
        (
            np.concatenate([r.values for r in rows]) if rows else np.empty(0),
            np.concatenate([r.indices for r in rows]) if rows else np.empty(0, dtype=np.int64),
            indptr,
        ),
        shape=(len(rows), dim),
    )


def randomized_svd(
    matrix: sparse.spmatrix | np.ndarray,
    k: int,
    seed: int,
    oversample: int = OVERSAMPLE,
    power_iterations: int = POWER_ITERATIONS,
):
    """Rank-k truncated SVD of an n x m matrix; deterministic for a seed.

    Returns (U, s, Vt) with U n x k, s length k descending, Vt k x m.
    """
    n, m = matrix.shape
    if k > min(n, m):
        raise RankTooLarge(f"k={k} exceeds min(shape)={min(n, m)}")
    rng = np.random.default_rng(seed)
    p = min(m, k + oversample)
    omega = rng.standard_normal((m, p))
    q, _ = np.linalg.qr(matrix @ omega)
    for _ in range(power_iterations):
        z, _ = np.linalg.qr(matrix.T @ q)
        q, _ = np.linalg.qr(matrix @ z)
    b = q.T @ matrix
    if sparse.issparse(b):
        b = b.toarray()
    ub, s, vt = np.linalg.svd(b, full_matrices=False)
    u = q @ ub
    return u[:, :k], s[:k], vt[:k]


def fit_lsi(tfidf_rows, k: int, seed: int, dim: int | None = None) -> LsiModel:
    """Fit on a TF-IDF weighted document-term matrix (rows or CSR).

    ``dim`` pins the vocabulary width when passing bare rows whose trailing
    columns may be all-zero.
    """
    matrix = _as_csr(tfidf_rows, dim=dim)
    _, s, vt = randomized_svd(matrix, k, seed)
    return LsiModel(k=k, projection=vt, singular_values=s)


def lsi_project(model: LsiModel, v: SparseVector | np.ndarray) -> np.ndarray:
    """Project a document vector into the k-dimensional latent space."""
    width = model.projection.shape[1]
    if isinstance(v, SparseVector):
        if v.nnz == 0:
            return np.zeros(model.k, dtype=np.float64)
        if int(v.indices[-1]) >= width:
            raise DimensionMismatch(
                f"vector index {int(v.indices[-1])} outside projection width {width}"
            )
        return model.projection[:, v.indices] @ v.values
    dense = np.asarray(v, dtype=np.float64)
    if dense.shape[0] != width:
        raise DimensionMismatch(
            f"vector length {dense.shape[0]} != projection width {width}"
        )
    return model.projection @ dense


def save_lsi(model: LsiModel, path) -> None:
    container.write_container(
        path,
        {
            "projection": model.projection,
            "singular_values": model.singular_values,
            "meta": container.json_section({"k": model.k}),
        },
        kind="lsi",
    )


def load_lsi(path) -> LsiModel:
    sections = container.read_container(path, kind="lsi")
    meta = container.json_value(sections["meta"])
    return LsiModel(
        k=int(meta["k"]),
        projection=sections["projection"],
        singular_values=sections["singular_values"],
    )
