"""Unit tests for the plant, its simulation and the state observer."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from ddpc_cli.exceptions import ConfigError, DataFileError, ShapeError, SystemValidationError
from ddpc_cli.plant import (
    ExcitationSpec,
    InnovationObserver,
    LinearSystem,
    NoiseSpec,
    TrajectoryBatch,
    benchmark_system,
    calibrate_innovation_std,
    deterministic_response,
    measure_snr,
    observer_decay,
    simulate,
    uniform_input,
)
from ddpc_cli.plant.system import BENCHMARK_A, BENCHMARK_B, BENCHMARK_C, BENCHMARK_D


def _system(k: list[list[float]]) -> LinearSystem:
    return LinearSystem(
        a=np.array(BENCHMARK_A),
        b=np.array(BENCHMARK_B),
        c=np.array(BENCHMARK_C),
        d=np.array(BENCHMARK_D),
        k=np.array(k),
    )


class TestLinearSystem:
    """Tests for LinearSystem."""

    def test_dimensions(self, plant: LinearSystem) -> None:
        """Test the benchmark dimensions and observer stability."""
        assert (plant.n_states, plant.m_inputs, plant.p_outputs) == (2, 1, 1)
        assert plant.lambda_max < 1.0

    def test_unstable_predictor_rejected(self) -> None:
        """Test that a K making A - KC unstable is rejected."""
        with pytest.raises(SystemValidationError) as exc_info:
            _system([[0.0], [5.0]])

        assert exc_info.value.details["spectral_radius"] >= 1.0

    def test_unobservable_rejected(self) -> None:
        """Test that an all-zero C is rejected."""
        with pytest.raises(SystemValidationError):
            LinearSystem(
                a=np.array(BENCHMARK_A),
                b=np.array(BENCHMARK_B),
                c=np.zeros((1, 2)),
                d=np.zeros((1, 1)),
                k=np.zeros((2, 1)),
            )

    def test_shape_mismatch(self) -> None:
        """Test that inconsistent matrix shapes raise."""
        with pytest.raises(ShapeError):
            LinearSystem(
                a=np.array(BENCHMARK_A),
                b=np.ones((3, 1)),
                c=np.array(BENCHMARK_C),
                d=np.array(BENCHMARK_D),
                k=np.zeros((2, 1)),
            )

    def test_toeplitz_holds_markov_parameters(self, plant: LinearSystem) -> None:
        """Test the lower-triangular Toeplitz layout."""
        toeplitz = plant.toeplitz_matrix(3)
        cb = float((plant.c @ plant.b)[0, 0])
        cab = float((plant.c @ plant.a @ plant.b)[0, 0])

        expected = np.array([[0.0, 0.0, 0.0], [cb, 0.0, 0.0], [cab, cb, 0.0]])
        np.testing.assert_allclose(toeplitz, expected)

    def test_benchmark_is_seeded(self) -> None:
        """Test that the innovation gain depends only on the seed."""
        first = benchmark_system(seed=11)
        second = benchmark_system(seed=11)

        np.testing.assert_array_equal(first.k, second.k)
        assert first.lambda_max < 1.0

    def test_observer_decay(self, plant: LinearSystem) -> None:
        """Test the spectral norm of the predictor matrix power."""
        expected = np.linalg.norm(plant.predictor_matrix @ plant.predictor_matrix, 2)

        assert observer_decay(plant, 2) == pytest.approx(expected)


class TestSimulation:
    """Tests for open-loop simulation."""

    def test_impulse_response(self) -> None:
        """Test y(1) = CB for a unit impulse from rest."""
        system = _system([[0.0], [0.0]])
        y = deterministic_response(system, np.zeros(2), [1.0, 0.0, 0.0])

        assert y[0, 0] == 0.0
        assert y[1, 0] == pytest.approx(0.00905, abs=1e-5)

    def test_initial_state_response(self, plant: LinearSystem) -> None:
        """Test y(0) = C x0 under zero input."""
        y = deterministic_response(plant, [1.0, 1.0], np.zeros(2))

        assert y[0, 0] == pytest.approx(1.4142)

    def test_noise_free_matches_deterministic(self, plant: LinearSystem) -> None:
        """Test that a zero innovation leaves the conditional mean unchanged."""
        u = uniform_input(50, 1, np.random.default_rng(0))
        batch = simulate(plant, [1.0, -1.0], u, NoiseSpec())

        np.testing.assert_allclose(batch.y, deterministic_response(plant, [1.0, -1.0], u))
        assert math.isinf(measure_snr(batch, plant, [1.0, -1.0]))

    def test_input_channel_mismatch(self, plant: LinearSystem) -> None:
        """Test that the input width must match B."""
        with pytest.raises(ShapeError):
            simulate(plant, np.zeros(2), np.zeros((5, 2)), NoiseSpec())

    def test_uniform_input_range(self) -> None:
        """Test the default excitation interval."""
        u = uniform_input(2000, 1, np.random.default_rng(3))

        assert u.shape == (2000, 1)
        assert u.min() >= -5.0
        assert u.max() <= 5.0
        assert ExcitationSpec().variance == pytest.approx(100.0 / 12.0)

    def test_invalid_specs(self) -> None:
        """Test that negative noise and empty intervals are rejected."""
        with pytest.raises(ConfigError):
            NoiseSpec(innovation_std=-1.0)
        with pytest.raises(ConfigError):
            ExcitationSpec(low=1.0, high=1.0)

    @pytest.mark.slow
    def test_calibrated_snr(self, plant: LinearSystem) -> None:
        """Test that the calibrated noise level reaches the target SNR."""
        excitation = ExcitationSpec()
        std = calibrate_innovation_std(plant, 18.0, excitation.variance)
        u = uniform_input(50000, 1, np.random.default_rng(4), excitation)

        batch = simulate(plant, np.zeros(2), u, NoiseSpec(innovation_std=std, seed=5))
        louder = simulate(plant, np.zeros(2), u, NoiseSpec(innovation_std=2.0 * std, seed=5))

        snr = measure_snr(batch, plant, np.zeros(2))
        assert snr == pytest.approx(18.0, abs=0.5)
        assert snr - measure_snr(louder, plant, np.zeros(2)) == pytest.approx(6.02, abs=0.01)

    @pytest.mark.parametrize("snr_db", [6.0, 12.0])
    def test_calibrated_snr_short_batch(self, plant: LinearSystem, snr_db: float) -> None:
        """Test the calibration at low SNR on a shorter batch."""
        excitation = ExcitationSpec()
        std = calibrate_innovation_std(plant, snr_db, excitation.variance)
        u = uniform_input(20000, 1, np.random.default_rng(6), excitation)

        batch = simulate(plant, np.zeros(2), u, NoiseSpec(innovation_std=std, seed=7))

        assert measure_snr(batch, plant, np.zeros(2)) == pytest.approx(snr_db, abs=0.5)


class TestInnovationObserver:
    """Tests for InnovationObserver."""

    def test_tracks_true_state(self, plant: LinearSystem) -> None:
        """Test that a correctly initialized observer reproduces the state exactly."""
        rng = np.random.default_rng(9)
        x = np.array([1.0, 1.0])
        observer = InnovationObserver(plant, x0=x)
        for _ in range(30):
            u = rng.uniform(-1.0, 1.0, size=1)
            e = rng.normal(0.0, 0.1, size=1)
            x, y = plant.step(x, u, e)
            observer.update(u, y)

        np.testing.assert_allclose(observer.state, x, atol=1e-12)

    def test_error_follows_predictor_matrix(self, plant: LinearSystem) -> None:
        """Test that the estimation error evolves with A - KC."""
        x = np.array([1.0, -2.0])
        observer = InnovationObserver(plant)
        u = np.array([0.5])
        x_next, y = plant.step(x, u, np.zeros(1))

        observer.update(u, y)

        np.testing.assert_allclose(x_next - observer.state, plant.predictor_matrix @ x)


class TestTrajectoryBatch:
    """Tests for TrajectoryBatch."""

    def test_csv_round_trip(self, noisy_batch: TrajectoryBatch, tmp_path: Path) -> None:
        """Test writing and reading a batch with innovations."""
        path = noisy_batch.to_csv(tmp_path / "data" / "batch.csv")
        loaded = TrajectoryBatch.read_csv(path)

        np.testing.assert_allclose(loaded.u, noisy_batch.u)
        np.testing.assert_allclose(loaded.y, noisy_batch.y)
        assert loaded.e is not None

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test that a missing CSV raises DataFileError."""
        with pytest.raises(DataFileError) as exc_info:
            TrajectoryBatch.read_csv(tmp_path / "missing.csv")

        assert exc_info.value.path == tmp_path / "missing.csv"

    def test_length_mismatch(self) -> None:
        """Test that u and y must have the same length."""
        with pytest.raises(ShapeError):
            TrajectoryBatch(u=np.zeros(4), y=np.zeros(5))

    def test_window(self, noisy_batch: TrajectoryBatch) -> None:
        """Test slicing a batch."""
        window = noisy_batch.window(10, 20)

        assert window.length == 10
        np.testing.assert_array_equal(window.u, noisy_batch.u[10:20])
