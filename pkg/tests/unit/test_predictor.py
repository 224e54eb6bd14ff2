"""Unit tests for the shared data-driven predictor."""

from __future__ import annotations

import numpy as np
import pytest

from ddpc_cli.exceptions import ShapeError
from ddpc_cli.linalg import build_hankel_set
from ddpc_cli.plant import (
    LinearSystem,
    NoiseSpec,
    TrajectoryBatch,
    benchmark_system,
    deterministic_response,
    simulate,
    uniform_input,
)
from ddpc_cli.predictor import (
    InitialCondition,
    PredictorData,
    build_predictor,
    decompose_alpha,
    gamma2_for_input,
    predict_output,
    solve_gamma1,
)


class TestInitialCondition:
    """Tests for InitialCondition."""

    def test_interleaves_samples(self) -> None:
        """Test z_init = [u(t-rho); y(t-rho); ...; u(t-1); y(t-1)]."""
        init = InitialCondition.from_history([[1.0], [2.0]], [[10.0], [20.0]])

        np.testing.assert_array_equal(init.z_init, [1.0, 10.0, 2.0, 20.0])

    def test_history_length_mismatch(self) -> None:
        """Test that input and output histories must be equally long."""
        with pytest.raises(ShapeError):
            InitialCondition.from_history([1.0, 2.0], [1.0])

    def test_wrong_size_for_predictor(self, noisy_predictor: PredictorData) -> None:
        """Test that z_init must have (m + p) rho entries."""
        with pytest.raises(ShapeError):
            solve_gamma1(noisy_predictor, InitialCondition.zeros(3))


class TestBuildPredictor:
    """Tests for build_predictor."""

    def test_projector(self, noisy_predictor: PredictorData) -> None:
        """Test that Pi is a symmetric idempotent projector reproducing Y_hat_F."""
        pi = noisy_predictor.pi

        np.testing.assert_allclose(pi, pi.T, atol=1e-12)
        np.testing.assert_allclose(pi @ pi, pi, atol=1e-10)
        np.testing.assert_allclose(
            noisy_predictor.hankel.y_future @ pi, noisy_predictor.y_hat_f, atol=1e-9
        )

    def test_explicit_predictor(self, noisy_predictor: PredictorData) -> None:
        """Test Theta [Z_P; U_F] = Y_hat_F and the split of Theta."""
        regressor = noisy_predictor.hankel.past_and_inputs()
        theta_p, theta_f = noisy_predictor.spc_matrices()

        np.testing.assert_allclose(
            noisy_predictor.theta @ regressor, noisy_predictor.y_hat_f, atol=1e-9
        )
        assert theta_p.shape == (15, 8)
        assert theta_f.shape == (15, 15)


class TestGammaCoordinates:
    """Tests for the gamma solves."""

    def test_alpha_star_reproduces_data(self, noisy_predictor: PredictorData) -> None:
        """Test that alpha* matches (z_init, u_f) and predicts like Theta."""
        rng = np.random.default_rng(5)
        init = InitialCondition(rng.normal(size=8))
        u_f = rng.normal(size=15)

        solution = decompose_alpha(noisy_predictor, init, u_f)

        assert solution.alpha_star is not None
        regressor = noisy_predictor.hankel.past_and_inputs()
        np.testing.assert_allclose(
            regressor @ solution.alpha_star, np.concatenate((init.z_init, u_f)), atol=1e-9
        )
        y_gamma = predict_output(noisy_predictor, solution.gamma1, solution.gamma2)
        theta_p, theta_f = noisy_predictor.spc_matrices()
        np.testing.assert_allclose(y_gamma, theta_p @ init.z_init + theta_f @ u_f, atol=1e-8)

    def test_noise_free_prediction_is_exact(
        self, exact_batch: TrajectoryBatch, plant: LinearSystem
    ) -> None:
        """Test that exact data predict the conditional mean of a fresh trajectory."""
        rho, horizon = 5, 15
        predictor = build_predictor(
            build_hankel_set(exact_batch, rho, horizon), require_full_rank=False
        )
        u = np.random.default_rng(6).uniform(-1.0, 1.0, size=(rho + horizon, 1))
        y = deterministic_response(plant, [1.0, 1.0], u)
        init = InitialCondition.from_history(u[:rho], y[:rho])

        gamma1 = solve_gamma1(predictor, init)
        gamma2 = gamma2_for_input(predictor, gamma1, u[rho:])
        y_pred = predict_output(predictor, gamma1, gamma2)

        np.testing.assert_allclose(y_pred, y[rho:, 0], atol=1e-6)


def _random_predictor(seed: int) -> PredictorData:
    """A small noisy predictor for a fresh plant draw and data draw."""
    plant = benchmark_system(seed=seed)
    rng = np.random.default_rng(1000 + seed)
    u = uniform_input(160, 1, rng)
    batch = simulate(plant, rng.normal(size=2), u, NoiseSpec(innovation_std=0.1), rng=rng)
    return build_predictor(build_hankel_set(batch, rho=3, horizon_T=5))


class TestDecompositionProperties:
    """Tests for the LQ, projector and predictor identities over random draws."""

    @pytest.mark.parametrize("seed", range(50))
    def test_identities(self, seed: int) -> None:
        """Test orthonormal Q, triangular L, alpha recovery, Pi and Theta on one draw."""
        pd = _random_predictor(seed)
        lq = pd.lq
        regressor = pd.hankel.past_and_inputs()
        q, lower = lq.orthonormal(), lq.lower()

        np.testing.assert_allclose(q @ q.T, np.eye(q.shape[0]), atol=1e-10)
        np.testing.assert_array_equal(np.triu(lower, 1), 0.0)
        np.testing.assert_allclose(lq.reassemble(), pd.hankel.stacked(), atol=1e-10)
        assert np.all(np.diag(lq.l11) > 0.0)
        assert np.linalg.cond(lq.l11) < 1e8

        rng = np.random.default_rng(seed)
        init = InitialCondition(rng.normal(size=pd.past_rows))
        u_f = rng.normal(size=pd.horizon_T)
        alpha = decompose_alpha(pd, init, u_f).alpha_star
        assert alpha is not None
        target = np.concatenate((init.z_init, u_f))
        np.testing.assert_allclose(regressor @ alpha, target, atol=1e-8)
        np.testing.assert_allclose(alpha, np.linalg.pinv(regressor) @ target, atol=1e-8)

        pi = pd.pi
        np.testing.assert_allclose(pi, pi.T, atol=1e-12)
        np.testing.assert_allclose(pi @ pi, pi, atol=1e-10)
        np.testing.assert_allclose(pi, np.linalg.pinv(regressor) @ regressor, atol=1e-9)

        theta = pd.hankel.y_future @ np.linalg.pinv(regressor)
        np.testing.assert_allclose(pd.theta, theta, atol=1e-8)

    @pytest.mark.parametrize("seed", range(10))
    def test_row_space_split(self, seed: int) -> None:
        """Test that the row-space split is orthonormal and annihilated by [Z_P; U_F]."""
        pd = _random_predictor(seed)
        basis, complement = pd.row_split

        assert basis.shape[0] + complement.shape[0] == pd.n_cols
        np.testing.assert_allclose(basis @ basis.T, np.eye(basis.shape[0]), atol=1e-10)
        np.testing.assert_allclose(basis @ complement.T, 0.0, atol=1e-10)
        np.testing.assert_allclose(
            pd.hankel.past_and_inputs() @ complement.T, 0.0, atol=1e-10
        )
