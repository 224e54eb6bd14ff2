"""Integration tests for closed-loop Monte-Carlo experiments."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from ddpc_cli.config import Settings
from ddpc_cli.harness import (
    Aggregate,
    ClosedLoopResult,
    ResultCache,
    compare,
    derive_rng,
    prepare_run,
    run_experiment,
    run_single,
    run_sweep,
)
from ddpc_cli.harness.experiment import oracle_config
from ddpc_cli.harness.results import (
    DIFF_COLUMNS,
    RUN_COLUMNS,
    SWEEP_COLUMNS,
    write_runs,
    write_sweep,
)
from ddpc_cli.models import ExperimentConfig, SchemeConfig, SweepSpec


class TestSeeding:
    """Tests for per-run random streams."""

    def test_streams_are_independent(self) -> None:
        """Test that streams and runs draw different numbers."""
        training = derive_rng(0, 0, "training").normal(size=3)

        np.testing.assert_array_equal(training, derive_rng(0, 0, "training").normal(size=3))
        assert not np.allclose(training, derive_rng(0, 0, "closed_loop").normal(size=3))
        assert not np.allclose(training, derive_rng(0, 1, "training").normal(size=3))

    def test_run_does_not_depend_on_order(self, small_config: ExperimentConfig) -> None:
        """Test that run 1 is the same alone or after run 0."""
        run_single(small_config, 0)
        after = run_single(small_config, 1)
        alone = run_single(small_config, 1)

        np.testing.assert_array_equal(after.u, alone.u)
        assert after.j_index == alone.j_index


class TestRunSingle:
    """Tests for one closed-loop run."""

    def test_indexes_match_trajectory(self, small_config: ExperimentConfig) -> None:
        """Test that the stored trajectory reproduces J and J_u."""
        result = run_single(small_config, 0)
        spec = small_config.control_spec(rho=4)

        assert result.ok
        assert result.u.shape == (10, 1)
        j, j_u = result.recompute_indexes(spec)
        assert j == pytest.approx(result.j_index, rel=1e-12)
        assert j_u == pytest.approx(result.j_u_index, rel=1e-12)
        assert result.diagnostics["rho"] == 4
        assert result.diagnostics["n_variables"] == 10

    def test_failure_is_tagged(self, small_config: ExperimentConfig) -> None:
        """Test that too little data gives a failed record instead of an exception."""
        cfg = small_config.model_copy(update={"n_data": 20})

        result = run_single(cfg, 0)

        assert result.status == "failed:insufficient_data"
        assert math.isnan(result.j_index)
        assert result.u.shape[0] == 0

    def test_noise_free_gamma_ddpc_tracks_oracle(self, small_config: ExperimentConfig) -> None:
        """Test that exact data make gamma-DDPC follow the model-based loop."""
        cfg = small_config.model_copy(update={"innovation_std": 0.0})

        gamma = run_single(cfg, 0)
        oracle = run_single(oracle_config(cfg), 0)

        assert gamma.ok and oracle.ok
        scale = max(1.0, float(np.max(np.abs(oracle.u))))
        assert float(np.max(np.abs(gamma.u - oracle.u))) <= 1e-4 * scale
        assert gamma.j_index == pytest.approx(oracle.j_index, rel=1e-4)

    def test_auto_rho(self, small_config: ExperimentConfig) -> None:
        """Test that rho = "auto" picks a candidate from the FPE search."""
        cfg = small_config.model_copy(update={"rho": "auto", "rho_min": 2, "rho_max": 8})

        setup = prepare_run(cfg, 0)

        assert 2 <= setup.rho <= 8

    def test_dict_form(self, small_config: ExperimentConfig) -> None:
        """Test the cached record form of a result."""
        result = run_single(small_config, 0)

        restored = ClosedLoopResult.from_dict(result.to_dict())

        np.testing.assert_array_equal(restored.y, result.y)
        assert restored.status == result.status


class TestRunExperiment:
    """Tests for run_experiment and its cache."""

    def test_cached_runs_are_reused(
        self,
        small_config: ExperimentConfig,
        settings: Settings,
        result_cache: ResultCache,
    ) -> None:
        """Test that a second call reads every run from the cache."""
        first = run_experiment(small_config, settings, result_cache)
        second = run_experiment(small_config, settings, result_cache)

        assert len(result_cache) == 2
        assert [r.run_index for r in second] == [0, 1]
        assert [r.j_index for r in second] == [r.j_index for r in first]

    @pytest.mark.slow
    def test_process_pool_matches_serial(
        self, small_config: ExperimentConfig, settings_no_cache: Settings
    ) -> None:
        """Test that worker processes give the same runs."""
        serial = run_experiment(small_config, settings_no_cache)
        parallel = run_experiment(
            small_config, settings_no_cache.model_copy(update={"workers": 2})
        )

        for a, b in zip(serial, parallel, strict=True):
            np.testing.assert_array_equal(a.u, b.u)


class TestAggregation:
    """Tests for comparisons, sweeps and result files."""

    def test_compare_against_oracle(
        self, small_config: ExperimentConfig, settings_no_cache: Settings
    ) -> None:
        """Test that the oracle row measures its spread around its own mean."""
        aggregates, runs = compare(small_config, ["gamma_ddpc", "oracle_mpc"], settings_no_cache)

        assert [a.scheme for a in aggregates] == ["gamma_ddpc", "oracle_mpc"]
        oracle = [r.j_index for r in runs["oracle_mpc"]]
        assert aggregates[1].mean_dJ == pytest.approx(abs(oracle[0] - oracle[1]) / 2.0)
        assert aggregates[0].n_runs == 2
        assert set(runs) == {"gamma_ddpc", "oracle_mpc"}

    def test_aggregate_skips_failed_runs(self, small_config: ExperimentConfig) -> None:
        """Test that failed runs count but do not enter the statistics."""
        ok = run_single(small_config, 0)
        failed = run_single(small_config.model_copy(update={"n_data": 20}), 1)

        aggregate = Aggregate.from_results("gamma_ddpc", [ok, failed])

        assert aggregate.n_runs == 2
        assert aggregate.n_failed == 1
        assert aggregate.mean_J == ok.j_index
        assert aggregate.std_J == 0.0
        assert math.isnan(aggregate.mean_dJ)

    def test_sweep_writes_rows(
        self, small_config: ExperimentConfig, settings_no_cache: Settings, tmp_path: Path
    ) -> None:
        """Test a penalty sweep and its CSV layout."""
        cfg = small_config.model_copy(
            update={
                "scheme": SchemeConfig(kind="gamma_ddpc_beta"),
                "sweep": SweepSpec(param="beta", values=[0.0, 10.0]),
            }
        )

        rows = run_sweep(cfg, settings_no_cache)
        path = write_sweep(rows, tmp_path / "sweep_beta.csv")

        assert [r.value for r in rows] == [0.0, 10.0]
        frame = pd.read_csv(path)
        assert list(frame.columns[: len(SWEEP_COLUMNS)]) == SWEEP_COLUMNS
        assert len(frame) == 2
        assert (frame["n_runs"] == 2).all()

    def test_two_parameter_sweep(
        self, small_config: ExperimentConfig, settings_no_cache: Settings, tmp_path: Path
    ) -> None:
        """Test a penalty grid over two parameters and its CSV layout."""
        cfg = small_config.model_copy(
            update={
                "scheme": SchemeConfig(kind="berberich"),
                "sweep": SweepSpec(
                    param=["bar_lambda_alpha", "lambda_sigma"],
                    values=[[1e-2, 1.0], [1e2, 1e4, 1e6]],
                ),
            }
        )

        rows = run_sweep(cfg, settings_no_cache)
        frame = pd.read_csv(write_sweep(rows, tmp_path / "sweep_grid.csv"))

        assert len(rows) == 6
        assert list(frame.columns[:6]) == ["bar_lambda_alpha", "lambda_sigma", *DIFF_COLUMNS]
        assert frame.shape[0] == 6
        assert list(frame["lambda_sigma"][:3]) == [1e2, 1e4, 1e6]
        assert set(frame["scheme"]) == {r.aggregate.scheme for r in rows}
        assert len(set(frame["scheme"])) == 6

    @pytest.mark.slow
    def test_benchmark_regeneration(self, settings_no_cache: Settings) -> None:
        """Test that a reduced benchmark comparison is finite and reproducible."""
        cfg = ExperimentConfig(
            seed=11, n_data=400, n_monte_carlo=4, test_length=20, horizon_T=12, rho=5
        )
        kinds = ["oracle_mpc", "spc", "spc_slack", "gamma_ddpc", "gamma_ddpc_beta"]

        first, _ = compare(cfg, kinds, settings_no_cache)
        second, _ = compare(cfg, kinds, settings_no_cache)

        assert [a.scheme.split("(")[0] for a in first] == kinds
        for a, b in zip(first, second, strict=True):
            assert a.n_failed == 0
            assert math.isfinite(a.mean_dJ) and math.isfinite(a.mean_dJu)
            assert a.mean_dJ == b.mean_dJ
            assert a.mean_J >= 0.0

    def test_run_csv(self, small_config: ExperimentConfig, tmp_path: Path) -> None:
        """Test the per-run CSV columns."""
        results = [run_single(small_config, 0)]

        frame = pd.read_csv(write_runs(results, tmp_path / "out" / "run_gamma_ddpc.csv"))

        assert list(frame.columns) == RUN_COLUMNS
        assert frame.loc[0, "status"] == "ok"
