"""Pytest configuration and fixtures."""

from __future__ import annotations

from pathlib import Path
from typing import Generator

import numpy as np
import pytest

from ddpc_cli.config import Settings
from ddpc_cli.controllers import ControlSpec
from ddpc_cli.harness.cache import ResultCache
from ddpc_cli.linalg.hankel import build_hankel_set
from ddpc_cli.models.config import ExperimentConfig
from ddpc_cli.plant import (
    LinearSystem,
    NoiseSpec,
    TrajectoryBatch,
    benchmark_system,
    simulate,
    uniform_input,
)
from ddpc_cli.predictor import PredictorData, build_predictor

RHO = 4
HORIZON_T = 15
N_DATA = 300


@pytest.fixture
def settings(tmp_path: Path) -> Settings:
    """Provide test settings."""
    return Settings(
        output_format="json",
        use_cache=True,
        cache_dir=tmp_path / "cache",
        workers=1,
        debug=False,
    )


@pytest.fixture
def settings_no_cache(tmp_path: Path) -> Settings:
    """Provide test settings with cache disabled."""
    return Settings(output_format="json", use_cache=False, cache_dir=tmp_path / "cache")


@pytest.fixture
def result_cache(tmp_path: Path) -> Generator[ResultCache, None, None]:
    """Provide a cache instance for testing."""
    cache_instance = ResultCache(cache_dir=tmp_path / "cache")
    yield cache_instance
    cache_instance.close()


@pytest.fixture
def plant() -> LinearSystem:
    """Provide the benchmark plant with a seeded innovation gain."""
    return benchmark_system(seed=1)


@pytest.fixture
def noisy_batch(plant: LinearSystem) -> TrajectoryBatch:
    """Provide a short noisy training batch."""
    rng = np.random.default_rng(7)
    u = uniform_input(N_DATA, 1, rng)
    return simulate(plant, np.zeros(2), u, NoiseSpec(innovation_std=0.05), rng=rng)


@pytest.fixture
def exact_batch(plant: LinearSystem) -> TrajectoryBatch:
    """Provide a noise-free training batch."""
    rng = np.random.default_rng(7)
    u = uniform_input(N_DATA, 1, rng)
    return simulate(plant, np.zeros(2), u, NoiseSpec())


@pytest.fixture
def noisy_predictor(noisy_batch: TrajectoryBatch) -> PredictorData:
    """Provide a full-rank predictor from noisy data."""
    return build_predictor(build_hankel_set(noisy_batch, RHO, HORIZON_T))


@pytest.fixture
def exact_predictor(exact_batch: TrajectoryBatch) -> PredictorData:
    """Provide a rank-deficient predictor from noise-free data."""
    return build_predictor(
        build_hankel_set(exact_batch, RHO, HORIZON_T), require_full_rank=False
    )


@pytest.fixture
def control_spec() -> ControlSpec:
    """Provide the default regulation problem for the test horizons."""
    return ControlSpec.create(horizon_T=HORIZON_T, rho=RHO)


@pytest.fixture
def small_config() -> ExperimentConfig:
    """Provide a fast two-run experiment."""
    return ExperimentConfig(
        seed=3,
        n_data=N_DATA,
        n_monte_carlo=2,
        test_length=10,
        horizon_T=10,
        rho=RHO,
    )


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    """Provide a small experiment TOML file."""
    path = tmp_path / "experiment.toml"
    path.write_text(
        "\n".join(
            [
                "seed = 3",
                f"n_data = {N_DATA}",
                "n_monte_carlo = 2",
                "test_length = 10",
                "horizon_T = 10",
                f"rho = {RHO}",
                "",
                "[scheme]",
                'kind = "gamma_ddpc"',
                "",
            ]
        )
    )
    return path
