"""Past-horizon selection with Akaike's Final Prediction Error."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import scipy.linalg as la
from numpy.typing import NDArray

from ddpc_cli.exceptions import InsufficientDataError, ShapeError
from ddpc_cli.plant.batch import TrajectoryBatch
from ddpc_cli.plant.system import LinearSystem, observer_decay

logger = logging.getLogger(__name__)

DEFAULT_RHO_RANGE = (2, 40)
ROWS_PER_PARAMETER = 10


@dataclass(frozen=True)
class HorizonSearch:
    """FPE score per candidate past horizon and the selected one."""

    rho_min: int
    rho_max: int
    scores: dict[int, float]
    chosen_rho: int
    decay: dict[int, float] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            {"rho": list(self.scores), "fpe": [self.scores[r] for r in self.scores]}
        )
        if self.decay:
            frame["decay"] = [self.decay[r] for r in self.scores]
        return frame


def arx_regressors(batch: TrajectoryBatch, rho: int, start: int) -> NDArray[np.float64]:
    """Rows [u(t-1..t-rho), y(t-1..t-rho), u(t)] for t = start .. N_data - 1."""
    stop = batch.length
    u_lags = [batch.u[start - lag : stop - lag] for lag in range(1, rho + 1)]
    y_lags = [batch.y[start - lag : stop - lag] for lag in range(1, rho + 1)]
    return np.hstack([*u_lags, *y_lags, batch.u[start:stop]])


def fpe_score(batch: TrajectoryBatch, rho: int, start: int) -> float:
    """FPE = V (1 + d/N) / (1 - d/N) of the least-squares one-step ARX predictor."""
    phi = arx_regressors(batch, rho, start)
    target = batch.y[start:]
    theta, *_ = la.lstsq(phi, target)
    residual = target - phi @ theta
    n_eff = phi.shape[0]
    d = phi.shape[1]
    v = float(np.mean(residual**2))
    return v * (1.0 + d / n_eff) / (1.0 - d / n_eff)


def select_rho(
    batch: TrajectoryBatch,
    rho_min: int = DEFAULT_RHO_RANGE[0],
    rho_max: int = DEFAULT_RHO_RANGE[1],
    system: LinearSystem | None = None,
    tie_rtol: float = 1e-10,
) -> HorizonSearch:
    """
    Score every rho in [rho_min, rho_max] and return the FPE minimizer.

    Every candidate is fitted on the same rows t >= rho_max so scores are comparable.
    Scores within ``tie_rtol * var(y)`` of the minimum count as ties and the smallest
    rho among them wins; exact (noise-free) fits only differ by roundoff.

    Args:
        batch: Open-loop training data.
        rho_min: Smallest candidate.
        rho_max: Largest candidate.
        system: True plant, when known, to record ||(A - KC)^rho||.
        tie_rtol: Tie tolerance relative to the output variance.

    Returns:
        The HorizonSearch.
    """
    if rho_min < 1 or rho_max < rho_min:
        raise ShapeError(f"Invalid rho range [{rho_min}, {rho_max}]")

    m, p = batch.m_inputs, batch.p_outputs
    rows = batch.length - rho_max
    required_rows = ROWS_PER_PARAMETER * (m + p) * rho_max
    if rows < required_rows:
        raise InsufficientDataError(
            f"rho_max={rho_max} needs {required_rows + rho_max} samples, got {batch.length}",
            required=required_rows + rho_max,
            available=batch.length,
        )

    scores = {rho: fpe_score(batch, rho, rho_max) for rho in range(rho_min, rho_max + 1)}
    best = min(scores.values())
    tolerance = tie_rtol * float(np.var(batch.y, axis=0).sum())
    chosen = min(rho for rho, score in scores.items() if score <= best + tolerance)

    decay = {rho: observer_decay(system, rho) for rho in scores} if system is not None else {}
    logger.info("FPE selected rho=%d over [%d, %d]", chosen, rho_min, rho_max)
    return HorizonSearch(
        rho_min=rho_min, rho_max=rho_max, scores=scores, chosen_rho=chosen, decay=decay
    )
