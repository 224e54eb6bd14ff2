"""Parameter sweeps and multi-scheme comparisons against the oracle baseline."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from ddpc_cli.config import Settings
from ddpc_cli.exceptions import ConfigError
from ddpc_cli.harness.cache import ResultCache
from ddpc_cli.harness.experiment import ClosedLoopResult, oracle_baseline, run_experiment
from ddpc_cli.models.config import (
    PENALTY_PARAMS,
    SCHEME_PENALTIES,
    ExperimentConfig,
    parse_grid,
)

logger = logging.getLogger(__name__)

__all__ = ["Aggregate", "SweepRow", "compare", "parse_grid", "run_sweep"]


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    if not values:
        return math.nan, math.nan
    arr = np.asarray(values, dtype=float)
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), std


@dataclass(frozen=True)
class Aggregate:
    """Mean and standard deviation of the indexes over the successful runs of one scheme."""

    scheme: str
    n_runs: int
    n_failed: int
    mean_J: float
    std_J: float
    mean_Ju: float
    std_Ju: float
    mean_dJ: float
    std_dJ: float
    mean_dJu: float
    std_dJu: float
    regulated_fraction: float

    @classmethod
    def from_results(
        cls,
        scheme: str,
        results: Sequence[ClosedLoopResult],
        baseline: Sequence[ClosedLoopResult] | None = None,
    ) -> Aggregate:
        """
        Differences are |J_r - mean(J_oracle)| per successful run r, where the oracle mean
        is taken once over the successful baseline runs (likewise for J_u).
        """
        ok = [r for r in results if r.ok]
        mean_j, std_j = _mean_std([r.j_index for r in ok])
        mean_ju, std_ju = _mean_std([r.j_u_index for r in ok])

        oracle = [r for r in baseline or () if r.ok]
        oracle_j, _ = _mean_std([r.j_index for r in oracle])
        oracle_ju, _ = _mean_std([r.j_u_index for r in oracle])
        if oracle:
            mean_dj, std_dj = _mean_std([abs(r.j_index - oracle_j) for r in ok])
            mean_dju, std_dju = _mean_std([abs(r.j_u_index - oracle_ju) for r in ok])
        else:
            mean_dj = std_dj = mean_dju = std_dju = math.nan
        regulated = [bool(r.diagnostics.get("regulated", False)) for r in ok]
        return cls(
            scheme=scheme,
            n_runs=len(results),
            n_failed=len(results) - len(ok),
            mean_J=mean_j,
            std_J=std_j,
            mean_Ju=mean_ju,
            std_Ju=std_ju,
            mean_dJ=mean_dj,
            std_dJ=std_dj,
            mean_dJu=mean_dju,
            std_dJu=std_dju,
            regulated_fraction=float(np.mean(regulated)) if regulated else math.nan,
        )

    def as_record(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class SweepRow:
    """One grid point: the swept values, keyed by parameter, and the aggregate there."""

    values: dict[str, float]
    aggregate: Aggregate

    @property
    def value(self) -> float:
        """The swept value of a one-parameter sweep."""
        if len(self.values) != 1:
            raise ConfigError(f"Sweep point {self.values} has several parameters", key="sweep")
        return next(iter(self.values.values()))

    def as_record(self) -> dict[str, Any]:
        """``param, value`` for one swept parameter, else one column per parameter."""
        if len(self.values) == 1:
            param, value = next(iter(self.values.items()))
            head: dict[str, Any] = {"param": param, "value": value}
        else:
            head = dict(self.values)
        return {**head, **self.aggregate.as_record()}


def run_sweep(
    cfg: ExperimentConfig,
    settings: Settings | None = None,
    cache: ResultCache | None = None,
) -> list[SweepRow]:
    """
    Run ``cfg.scheme`` at every point of the Cartesian grid of ``cfg.sweep``.

    Sweeps over penalties only share one oracle baseline; a grid that touches rho, n_data,
    snr_target_db or horizon_T changes the experiment and gets a baseline per point.
    """
    if cfg.sweep is None:
        raise ConfigError("Sweep needs a parameter and a nonempty grid", key="sweep")
    params = cfg.sweep.param
    penalty = all(param in PENALTY_PARAMS for param in params)
    for param in params:
        if param in PENALTY_PARAMS and param not in SCHEME_PENALTIES[cfg.scheme.kind]:
            logger.warning("Scheme %s does not use %s; its grid changes nothing",
                           cfg.scheme.kind, param)

    shared = oracle_baseline(cfg, settings, cache) if penalty else None
    rows: list[SweepRow] = []
    for values in cfg.sweep.points():
        point = cfg.with_values(values)
        baseline = shared if shared is not None else oracle_baseline(point, settings, cache)
        results = run_experiment(point, settings, cache)
        aggregate = Aggregate.from_results(point.scheme.tag, results, baseline)
        logger.info("Sweep %s: mean |dJ| = %.6g", values, aggregate.mean_dJ)
        rows.append(SweepRow(values=values, aggregate=aggregate))
    return rows


def compare(
    cfg: ExperimentConfig,
    kinds: Sequence[str],
    settings: Settings | None = None,
    cache: ResultCache | None = None,
) -> tuple[list[Aggregate], dict[str, list[ClosedLoopResult]]]:
    """
    Every scheme in ``kinds`` on the same runs, against one shared oracle baseline.

    Penalties come from ``[schemes.<kind>]`` when present, else from ``[scheme]``.

    Returns:
        One Aggregate per scheme and the per-run results keyed by scheme tag.
    """
    if not kinds:
        raise ConfigError("compare needs at least one scheme", key="schemes")
    baseline = oracle_baseline(cfg, settings, cache)
    aggregates: list[Aggregate] = []
    runs: dict[str, list[ClosedLoopResult]] = {}
    for kind in kinds:
        scheme = cfg.scheme_for(kind)
        if kind == "oracle_mpc":
            results = baseline
        else:
            results = run_experiment(cfg.with_scheme(scheme), settings, cache)
        aggregates.append(Aggregate.from_results(scheme.tag, results, baseline))
        runs[scheme.tag] = results
    return aggregates, runs
