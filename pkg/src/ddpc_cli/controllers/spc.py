"""Subspace predictive control and its slack-relaxed initial condition."""

from __future__ import annotations

from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ddpc_cli.controllers.base import DataDrivenController
from ddpc_cli.controllers.spec import ControlSpec, ControlStep
from ddpc_cli.exceptions import ConfigError, ShapeError
from ddpc_cli.predictor.data import InitialCondition, PredictorData
from ddpc_cli.qp.admm import SolverSettings

# ||sigma|| above this fraction of max(1, ||z_init||) means the initial condition was relaxed
RELAXED_RTOL = 1e-6


class SPC(DataDrivenController):
    """
    Decision u_f; y_f = Theta_p z_init + Theta_f u_f with Theta = Y_hat_F [Z_P; U_F]^+.

    On full-rank data this is the gamma path with g1 = L11^-1 z_init fixed: both give
    y_f = L31 g1 + L32 g2 for every u_f, so SPC and :class:`GammaDDPC` share the optimum.
    """

    scheme = "spc"

    def __init__(
        self, pd: PredictorData, spec: ControlSpec, settings: SolverSettings | None = None
    ) -> None:
        self._theta_past, self._theta_future = pd.spc_matrices()
        super().__init__(pd, spec, settings)

    def input_map(self) -> NDArray[np.float64]:
        return np.eye(self.pd.m_inputs * self.pd.horizon_T)

    def output_map(self) -> NDArray[np.float64]:
        return self._theta_future

    def offsets(
        self, context: NDArray[np.float64]
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return np.zeros(self._n), self._theta_past @ context


class SPCSlack(DataDrivenController):
    """
    SPC with [z_init + sigma; u_f] in place of [z_init; u_f] and lam ||sigma||_W^2 in the cost.

    Solved in gamma coordinates: sigma = L11 g1 - z_init, u_f = L21 g1 + L22 g2,
    y_f = L31 g1 + L32 g2. ``slack_weight`` is an optional per-entry diagonal weight W
    (length (m+p) rho), e.g. to price past inputs and past outputs differently.
    """

    scheme = "spc_slack"

    def __init__(
        self,
        pd: PredictorData,
        spec: ControlSpec,
        lam: float,
        slack_weight: ArrayLike | None = None,
        settings: SolverSettings | None = None,
    ) -> None:
        if lam < 0.0:
            raise ConfigError(f"lam must be nonnegative, got {lam}", key="lam")
        weight = np.ones(pd.past_rows) if slack_weight is None else np.asarray(slack_weight, float)
        if weight.shape != (pd.past_rows,):
            raise ShapeError(f"slack_weight needs {pd.past_rows} entries, got {weight.shape}")
        if np.any(weight < 0.0):
            raise ConfigError("slack_weight entries must be nonnegative", key="slack_weight")
        self.lam = lam
        self._weight = lam * weight
        super().__init__(pd, spec, settings)

    def input_map(self) -> NDArray[np.float64]:
        lq = self.pd.lq
        return np.hstack((lq.l21, lq.l22))

    def output_map(self) -> NDArray[np.float64]:
        lq = self.pd.lq
        return np.hstack((lq.l31, lq.l32))

    def offsets(
        self, context: NDArray[np.float64]
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return np.zeros(self._mu.shape[0]), np.zeros(self._my.shape[0])

    def _selector(self) -> NDArray[np.float64]:
        """sigma + z_init = S x."""
        l11 = self.pd.lq.l11
        return np.hstack((l11, np.zeros((l11.shape[0], self._n - l11.shape[1]))))

    def penalty_hessian(self) -> NDArray[np.float64]:
        s = self._selector()
        return s.T @ (self._weight[:, None] * s)

    def penalty_linear(self, context: NDArray[np.float64]) -> tuple[NDArray[np.float64], float]:
        s = self._selector()
        return -s.T @ (self._weight * context), float(context @ (self._weight * context))

    def extras(self, x: NDArray[np.float64], context: NDArray[np.float64]) -> dict[str, Any]:
        sigma = self._selector() @ x - context
        sigma_norm = float(np.linalg.norm(sigma))
        return {
            "sigma_norm": sigma_norm,
            "gamma2_norm": float(np.linalg.norm(x[self.pd.past_rows :])),
            "init_relaxed": sigma_norm > RELAXED_RTOL * max(1.0, float(np.linalg.norm(context))),
        }


def spc_step(pd: PredictorData, spec: ControlSpec, init: InitialCondition) -> ControlStep:
    return SPC(pd, spec).step(init)


def spc_slack_step(
    pd: PredictorData, spec: ControlSpec, init: InitialCondition, lam: float
) -> ControlStep:
    return SPCSlack(pd, spec, lam).step(init)
