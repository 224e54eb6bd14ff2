"""Unit tests for rank, projection and LQ utilities."""

from __future__ import annotations

import numpy as np
import pytest

from ddpc_cli.exceptions import (
    InsufficientDataError,
    RankDeficiencyError,
    ResidualTooLargeError,
    ShapeError,
)
from ddpc_cli.linalg import (
    build_hankel_set,
    lq_decompose,
    min_norm_solve,
    numerical_rank,
    project_rows,
    pseudo_inverse,
)
from ddpc_cli.plant import TrajectoryBatch


class TestRankAndProjection:
    """Tests for numerical_rank, pseudo_inverse and project_rows."""

    def test_rank_of_duplicated_rows(self) -> None:
        """Test that a repeated row does not add rank."""
        matrix = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 0.0]])

        assert numerical_rank(matrix) == 2
        assert numerical_rank(np.zeros((3, 3))) == 0

    def test_pseudo_inverse_identities(self) -> None:
        """Test A A^+ A = A for a rank-deficient matrix."""
        a = np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 0.0]])
        a_pinv = pseudo_inverse(a)

        np.testing.assert_allclose(a @ a_pinv @ a, a, atol=1e-12)

    def test_projection_is_idempotent(self) -> None:
        """Test that projecting twice changes nothing."""
        rng = np.random.default_rng(1)
        a = rng.normal(size=(3, 12))
        b = rng.normal(size=(2, 12))

        once = project_rows(b, a)
        twice = project_rows(once, a)

        np.testing.assert_allclose(once, twice, atol=1e-12)
        # the residual is orthogonal to the rows of a
        np.testing.assert_allclose((b - once) @ a.T, np.zeros((2, 3)), atol=1e-12)

    def test_projection_column_mismatch(self) -> None:
        """Test that column counts must agree."""
        with pytest.raises(ShapeError):
            project_rows(np.ones((2, 4)), np.ones((2, 5)))


class TestMinNormSolve:
    """Tests for min_norm_solve."""

    def test_underdetermined(self) -> None:
        """Test the minimum-norm solution of x1 + x2 = 2."""
        alpha = min_norm_solve([[1.0, 1.0]], [2.0])

        np.testing.assert_allclose(alpha, [1.0, 1.0])

    def test_inconsistent(self) -> None:
        """Test that an inconsistent system raises with its residual."""
        with pytest.raises(ResidualTooLargeError) as exc_info:
            min_norm_solve([[1.0], [1.0]], [0.0, 2.0])

        assert exc_info.value.residual == pytest.approx(np.sqrt(2.0))

    def test_row_mismatch(self) -> None:
        """Test that rhs length must match the rows."""
        with pytest.raises(ShapeError):
            min_norm_solve(np.eye(2), np.ones(3))


class TestLqDecompose:
    """Tests for lq_decompose."""

    def test_reassembles_noisy_data(self, noisy_batch: TrajectoryBatch) -> None:
        """Test L Q = H, orthonormal Q and the nonnegative diagonal."""
        h = build_hankel_set(noisy_batch, rho=3, horizon_T=5)
        lq = lq_decompose(h)

        np.testing.assert_allclose(lq.reassemble(), h.stacked(), atol=1e-10)
        q = lq.orthonormal()
        np.testing.assert_allclose(q @ q.T, np.eye(q.shape[0]), atol=1e-10)
        assert np.all(np.diag(lq.lower()) >= 0.0)
        assert lq.full_rank
        assert lq.l11.shape == (6, 6)
        assert lq.l22.shape == (5, 5)
        assert lq.l33.shape == (5, 5)

    def test_noise_free_rank(self, exact_batch: TrajectoryBatch) -> None:
        """Test that deterministic data are rank deficient."""
        h = build_hankel_set(exact_batch, rho=3, horizon_T=5)

        assert numerical_rank(h.z_past) == 5
        with pytest.raises(RankDeficiencyError) as exc_info:
            lq_decompose(h)
        assert exc_info.value.expected == 16

        lq = lq_decompose(h, require_full_rank=False)
        assert not lq.full_rank
        np.testing.assert_allclose(lq.reassemble(), h.stacked(), atol=1e-10)

    def test_too_few_columns(self) -> None:
        """Test that N must cover the stacked rows."""
        rng = np.random.default_rng(2)
        batch = TrajectoryBatch(u=rng.normal(size=30), y=rng.normal(size=30))
        h = build_hankel_set(batch, rho=4, horizon_T=10)

        with pytest.raises(InsufficientDataError):
            lq_decompose(h)
