"""Closed-loop Monte-Carlo runs on the benchmark plant.

Every random quantity of run ``i`` is drawn from a generator derived from
``(cfg.seed, i, stream)``, so a run does not depend on which other runs execute, in
which order, or in which process.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from ddpc_cli.config import Settings, get_settings
from ddpc_cli.controllers.base import DataDrivenController, QpController
from ddpc_cli.controllers.oracle import OracleMPC
from ddpc_cli.controllers.registry import build_controller, default_settings
from ddpc_cli.controllers.spec import ControlSpec, ControlStep
from ddpc_cli.exceptions import DDPCError
from ddpc_cli.harness.cache import ResultCache
from ddpc_cli.linalg.hankel import build_hankel_set
from ddpc_cli.models.config import ExperimentConfig, SchemeConfig
from ddpc_cli.plant.batch import TrajectoryBatch
from ddpc_cli.plant.observer import InnovationObserver
from ddpc_cli.plant.simulation import (
    NoiseSpec,
    calibrate_innovation_std,
    simulate,
    uniform_input,
)
from ddpc_cli.plant.system import LinearSystem, as_state, benchmark_system
from ddpc_cli.predictor.data import InitialCondition, PredictorData, build_predictor
from ddpc_cli.predictor.horizon import select_rho
from ddpc_cli.qp.admm import SolverSettings

logger = logging.getLogger(__name__)

STREAMS = {"system": 0, "training": 1, "closed_loop": 2}
STATUS_OK = "ok"
REGULATION_RATIO = 0.1


def _seed_sequence(seed: int, run_index: int, stream: str) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(run_index, STREAMS[stream]))


def derive_rng(seed: int, run_index: int, stream: str) -> np.random.Generator:
    """Independent generator for one (run, stream) pair."""
    return np.random.default_rng(_seed_sequence(seed, run_index, stream))


def derive_seed(seed: int, run_index: int, stream: str) -> int:
    return int(_seed_sequence(seed, run_index, stream).generate_state(1)[0])


@dataclass(frozen=True)
class RunSetup:
    """Plant, noise level, training data and past horizon of one Monte-Carlo run."""

    run_index: int
    run_seed: int
    system: LinearSystem
    innovation_std: float
    batch: TrajectoryBatch
    rho: int

    @property
    def noise_free(self) -> bool:
        return self.innovation_std == 0.0


def training_batch(
    cfg: ExperimentConfig, run_index: int
) -> tuple[LinearSystem, float, TrajectoryBatch]:
    """Draw K, calibrate the noise and collect the open-loop batch from x = 0."""
    system = benchmark_system(derive_seed(cfg.seed, run_index, "system"))
    if cfg.innovation_std is not None:
        std = cfg.innovation_std
    else:
        std = calibrate_innovation_std(system, cfg.snr_target_db, cfg.excitation.variance)

    rng = derive_rng(cfg.seed, run_index, "training")
    u = uniform_input(cfg.n_data, system.m_inputs, rng, cfg.excitation)
    batch = simulate(system, np.zeros(system.n_states), u, NoiseSpec(innovation_std=std), rng=rng)
    return system, std, batch


def prepare_run(cfg: ExperimentConfig, run_index: int) -> RunSetup:
    """Training data of run ``run_index`` plus its past horizon (FPE when rho is "auto")."""
    system, std, batch = training_batch(cfg, run_index)
    if cfg.rho == "auto":
        rho = select_rho(batch, cfg.rho_min, cfg.rho_max, system=system).chosen_rho
    else:
        rho = cfg.rho
    return RunSetup(
        run_index=run_index,
        run_seed=derive_seed(cfg.seed, run_index, "system"),
        system=system,
        innovation_std=std,
        batch=batch,
        rho=rho,
    )


def build_run_predictor(setup: RunSetup, horizon_T: int) -> PredictorData:
    hankel = build_hankel_set(setup.batch, setup.rho, horizon_T)
    return build_predictor(hankel, require_full_rank=not setup.noise_free)


def solver_settings(cfg: ExperimentConfig, kind: str) -> SolverSettings:
    base = default_settings(kind)
    return replace(base, tol=cfg.solver_tol, max_iter=cfg.solver_max_iter or base.max_iter)


@dataclass
class ClosedLoopResult:
    """Indexes and trajectory of one closed-loop test."""

    run_index: int
    run_seed: int
    scheme_tag: str
    status: str
    j_index: float
    j_u_index: float
    u: NDArray[np.float64]
    y: NDArray[np.float64]
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    def recompute_indexes(self, spec: ControlSpec) -> tuple[float, float]:
        """(J, J_u) from the stored trajectory."""
        return performance_indexes(self.u, self.y, spec)

    def trajectory_frame(self) -> pd.DataFrame:
        columns: dict[str, Any] = {
            "run_id": np.full(self.u.shape[0], self.run_index),
            "t": np.arange(self.u.shape[0]),
        }
        for i in range(self.u.shape[1]):
            columns[f"u_{i + 1}"] = self.u[:, i]
        for i in range(self.y.shape[1]):
            columns[f"y_{i + 1}"] = self.y[:, i]
        return pd.DataFrame(columns)

    def to_dict(self) -> dict[str, Any]:
        return {
            "run_index": self.run_index,
            "run_seed": self.run_seed,
            "scheme_tag": self.scheme_tag,
            "status": self.status,
            "j_index": self.j_index,
            "j_u_index": self.j_u_index,
            "u": self.u.tolist(),
            "y": self.y.tolist(),
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ClosedLoopResult:
        m = len(data["u"][0]) if data["u"] else 1
        p = len(data["y"][0]) if data["y"] else 1
        return cls(
            run_index=int(data["run_index"]),
            run_seed=int(data["run_seed"]),
            scheme_tag=data["scheme_tag"],
            status=data["status"],
            j_index=float(data["j_index"]),
            j_u_index=float(data["j_u_index"]),
            u=np.asarray(data["u"], dtype=float).reshape(-1, m),
            y=np.asarray(data["y"], dtype=float).reshape(-1, p),
            diagnostics=dict(data["diagnostics"]),
        )


def performance_indexes(
    u: NDArray[np.float64], y: NDArray[np.float64], spec: ControlSpec
) -> tuple[float, float]:
    """J = sum ||y - y_r||_Q^2 + ||u - u_r||_R^2 and J_u = sum ||u||^2."""
    j = math.fsum(spec.stage_cost(u[t], y[t]) for t in range(u.shape[0]))
    j_u = math.fsum(float(u[t] @ u[t]) for t in range(u.shape[0]))
    return j, j_u


def _summarize_steps(steps: Sequence[ControlStep]) -> dict[str, Any]:
    if not steps:
        return {}
    stats = steps[0].solver_stats
    iterations = [int(s.solver_stats.get("iterations", 0)) for s in steps]
    summary: dict[str, Any] = {
        "n_variables": int(stats.get("n_variables", 0)),
        "n_alpha": int(stats.get("n_alpha", 0)),
        "mean_iterations": float(np.mean(iterations)),
        "max_iterations": int(max(iterations)),
    }
    for key in steps[0].decision_extras:
        values = [s.decision_extras[key] for s in steps]
        if isinstance(values[0], bool):
            summary[f"{key}_fraction"] = float(np.mean(values))
        else:
            summary[f"mean_{key}"] = float(np.mean(values))
    return summary


def run_closed_loop(
    controller: QpController,
    setup: RunSetup,
    cfg: ExperimentConfig,
    scheme_tag: str,
) -> ClosedLoopResult:
    """
    Warm up with rho zero-input steps from x0, then close the loop for ``test_length`` steps.

    The innovation sequence depends only on (seed, run), so every scheme of a run sees
    the same disturbance. The oracle uses an innovation observer started at zero, or the
    exact state on noise-free runs; data-driven schemes use the last rho samples.
    """
    system, rho = setup.system, setup.rho
    m, p = system.m_inputs, system.p_outputs
    length = cfg.test_length
    rng = derive_rng(cfg.seed, setup.run_index, "closed_loop")
    if setup.noise_free:
        e = np.zeros((rho + length, p))
    else:
        e = rng.normal(0.0, setup.innovation_std, size=(rho + length, p))

    x = as_state(cfg.x0, system).copy()
    observer = InnovationObserver(system)
    u_hist = np.zeros((rho + length, m))
    y_hist = np.zeros((rho + length, p))
    for k in range(rho):
        x, y_hist[k] = system.step(x, u_hist[k], e[k])
        observer.update(u_hist[k], y_hist[k])

    steps: list[ControlStep] = []
    status = STATUS_OK
    error: DDPCError | None = None
    for t in range(rho, rho + length):
        try:
            if isinstance(controller, OracleMPC):
                step = controller.step(x if setup.noise_free else observer.state)
            elif isinstance(controller, DataDrivenController):
                init = InitialCondition.from_history(u_hist[t - rho : t], y_hist[t - rho : t])
                step = controller.step(init)
            else:
                raise TypeError(f"Unsupported controller {type(controller).__name__}")
        except DDPCError as exc:
            status, error = f"failed:{exc.code}", exc
            logger.warning(
                "Run %d (%s) failed at t=%d: %s", setup.run_index, scheme_tag, t - rho, exc
            )
            break
        steps.append(step)
        u_hist[t] = step.u_first
        x, y_hist[t] = system.step(x, u_hist[t], e[t])
        observer.update(u_hist[t], y_hist[t])

    u = u_hist[rho : rho + len(steps)]
    y = y_hist[rho : rho + len(steps)]
    diagnostics = {
        "rho": rho,
        "innovation_std": setup.innovation_std,
        **_summarize_steps(steps),
    }
    if error is not None:
        diagnostics["failed_step"] = len(steps)
        diagnostics["error"] = error.message
        return ClosedLoopResult(
            setup.run_index, setup.run_seed, scheme_tag, status, math.nan, math.nan, u, y,
            diagnostics,
        )

    j, j_u = performance_indexes(u, y, controller.spec)
    y0 = float(np.linalg.norm(y[0]))
    ratio = float(np.linalg.norm(y[-1])) / y0 if y0 > 0.0 else 0.0
    diagnostics["final_output_ratio"] = ratio
    diagnostics["regulated"] = ratio <= REGULATION_RATIO
    return ClosedLoopResult(
        setup.run_index, setup.run_seed, scheme_tag, status, j, j_u, u, y, diagnostics
    )


def _failed(
    cfg: ExperimentConfig, run_index: int, scheme: SchemeConfig, error: DDPCError
) -> ClosedLoopResult:
    logger.warning("Run %d (%s) failed during setup: %s", run_index, scheme.tag, error)
    return ClosedLoopResult(
        run_index=run_index,
        run_seed=derive_seed(cfg.seed, run_index, "system"),
        scheme_tag=scheme.tag,
        status=f"failed:{error.code}",
        j_index=math.nan,
        j_u_index=math.nan,
        u=np.zeros((0, 1)),
        y=np.zeros((0, 1)),
        diagnostics={"error": error.message, **error.details},
    )


def run_single(cfg: ExperimentConfig, run_index: int) -> ClosedLoopResult:
    """One Monte-Carlo run of ``cfg.scheme``; errors become a tagged failure record."""
    scheme = cfg.scheme
    try:
        setup = prepare_run(cfg, run_index)
        spec = cfg.control_spec(setup.rho, setup.system.m_inputs, setup.system.p_outputs)
        predictor = build_run_predictor(setup, cfg.horizon_T) if scheme.data_driven else None
        controller = build_controller(
            scheme, predictor, spec, system=setup.system, settings=solver_settings(cfg, scheme.kind)
        )
        result = run_closed_loop(controller, setup, cfg, scheme.tag)
    except DDPCError as exc:
        return _failed(cfg, run_index, scheme, exc)
    logger.info(
        "Run %d (%s): status=%s J=%.6g J_u=%.6g",
        run_index,
        scheme.tag,
        result.status,
        result.j_index,
        result.j_u_index,
    )
    return result


def _run_args(args: tuple[ExperimentConfig, int]) -> ClosedLoopResult:
    return run_single(*args)


def run_experiment(
    cfg: ExperimentConfig,
    settings: Settings | None = None,
    cache: ResultCache | None = None,
) -> list[ClosedLoopResult]:
    """
    All Monte-Carlo runs of ``cfg``, sorted by run index.

    Cached runs are reused; the rest run in a process pool when ``settings.workers > 1``.
    """
    settings = settings or get_settings()
    fingerprint = cfg.fingerprint()
    results: dict[int, ClosedLoopResult] = {}
    pending: list[int] = []
    for index in range(cfg.n_monte_carlo):
        cached = cache.get("run", {"config": fingerprint, "run": index}) if cache else None
        if cached is not None:
            results[index] = ClosedLoopResult.from_dict(cached)
        else:
            pending.append(index)

    if pending:
        jobs = [(cfg, index) for index in pending]
        if settings.parallel and len(pending) > 1:
            with ProcessPoolExecutor(max_workers=settings.workers) as pool:
                fresh = list(pool.map(_run_args, jobs))
        else:
            fresh = [_run_args(job) for job in jobs]
        for index, result in zip(pending, fresh, strict=True):
            results[index] = result
            if cache is not None:
                cache.set("run", {"config": fingerprint, "run": index}, result.to_dict())

    n_failed = sum(not r.ok for r in results.values())
    logger.info(
        "%s: %d runs, %d failed (%d from cache)",
        cfg.scheme.tag,
        cfg.n_monte_carlo,
        n_failed,
        cfg.n_monte_carlo - len(pending),
    )
    return [results[index] for index in sorted(results)]


def oracle_config(cfg: ExperimentConfig) -> ExperimentConfig:
    """``cfg`` with the default oracle scheme, so every comparison shares one baseline."""
    return cfg.with_scheme(SchemeConfig(kind="oracle_mpc"))


def oracle_baseline(
    cfg: ExperimentConfig,
    settings: Settings | None = None,
    cache: ResultCache | None = None,
) -> list[ClosedLoopResult]:
    """Oracle MPC runs on the same seeds, plants and disturbances as ``cfg``."""
    return run_experiment(oracle_config(cfg), settings, cache)
