"""Randomized truncated SVD fidelity on exact low-rank matrices."""

from __future__ import annotations

import numpy as np
import pytest
from scipy import sparse

from vizrec.errors import DimensionMismatch, RankTooLarge
from vizrec.models import (
    SparseVector,
    fit_lsi,
    load_lsi,
    lsi_project,
    randomized_svd,
    save_lsi,
)


def exact_rank_k_matrix(n, m, k, seed):
    rng = np.random.default_rng(seed)
    left = rng.standard_normal((n, k))
    right = rng.standard_normal((k, m))
    return left @ right


def pairwise_cosines(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    unit = rows / np.where(norms == 0, 1.0, norms)
    return unit @ unit.T


class TestRandomizedSvd:
    @pytest.mark.parametrize("k", [1, 3, 7, 10])
    def test_singular_values_match_dense_oracle(self, k):
        matrix = exact_rank_k_matrix(50, 200, k, seed=100 + k)
        _, s, _ = randomized_svd(matrix, k, seed=1)
        oracle = np.linalg.svd(matrix, compute_uv=False)[:k]
        np.testing.assert_allclose(s, oracle, atol=1e-6, rtol=1e-9)

    def test_reconstruction_exact_at_true_rank(self):
        matrix = exact_rank_k_matrix(50, 200, 5, seed=7)
        u, s, vt = randomized_svd(matrix, 5, seed=1)
        np.testing.assert_allclose(u * s @ vt, matrix, atol=1e-8)

    def test_deterministic(self):
        matrix = exact_rank_k_matrix(30, 60, 4, seed=3)
        a = randomized_svd(matrix, 4, seed=9)
        b = randomized_svd(matrix, 4, seed=9)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)

    def test_rank_too_large(self):
        with pytest.raises(RankTooLarge):
            randomized_svd(np.ones((5, 8)), 6, seed=0)


class TestFitLsi:
    @pytest.mark.parametrize("k", [2, 5, 10])
    def test_projected_cosines_match_full_space(self, k):
        matrix = exact_rank_k_matrix(50, 200, k, seed=40 + k)
        model = fit_lsi(sparse.csr_matrix(matrix), k=k, seed=11)
        projected = np.vstack([lsi_project(model, row) for row in matrix])
        np.testing.assert_allclose(
            pairwise_cosines(projected), pairwise_cosines(matrix), atol=1e-6
        )

    def test_projection_rows_orthonormal(self):
        matrix = exact_rank_k_matrix(50, 200, 6, seed=5)
        model = fit_lsi(sparse.csr_matrix(matrix), k=6, seed=11)
        gram = model.projection @ model.projection.T
        np.testing.assert_allclose(gram, np.eye(6), atol=1e-6)

    def test_singular_values_descending(self):
        matrix = exact_rank_k_matrix(50, 200, 8, seed=6)
        model = fit_lsi(sparse.csr_matrix(matrix), k=8, seed=11)
        assert np.all(np.diff(model.singular_values) <= 1e-12)

    def test_sparse_vector_rows_with_pinned_width(self):
        rows = [
            SparseVector(np.array([0, 2]), np.array([1.0, 2.0])),
            SparseVector(np.array([1, 2]), np.array([3.0, 1.0])),
            SparseVector(np.array([0, 1]), np.array([2.0, 2.0])),
        ]
        model = fit_lsi(rows, k=2, seed=4, dim=5)
        assert model.projection.shape == (2, 5)
        # projecting a sparse row equals projecting its dense form
        dense = rows[0].to_dense(5)
        np.testing.assert_allclose(
            lsi_project(model, rows[0]), lsi_project(model, dense), atol=1e-12
        )

    def test_projection_dimension_guard(self):
        rows = [SparseVector(np.array([0, 1]), np.array([1.0, 1.0]))]
        model = fit_lsi(rows, k=1, seed=4, dim=2)
        with pytest.raises(DimensionMismatch):
            lsi_project(model, SparseVector(np.array([5]), np.array([1.0])))
        with pytest.raises(DimensionMismatch):
            lsi_project(model, np.ones(7))

    def test_save_load_roundtrip(self, tmp_path):
        matrix = exact_rank_k_matrix(20, 30, 3, seed=2)
        model = fit_lsi(sparse.csr_matrix(matrix), k=3, seed=11)
        save_lsi(model, tmp_path / "lsi.bin")
        loaded = load_lsi(tmp_path / "lsi.bin")
        assert loaded.k == model.k
        np.testing.assert_array_equal(loaded.projection, model.projection)
        np.testing.assert_array_equal(loaded.singular_values, model.singular_values)
