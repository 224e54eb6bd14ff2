"""Two-stage gamma-DDPC: gamma1 fixed by the initial condition, the QP over gamma2 only."""

from __future__ import annotations

from typing import Any

import numpy as np
from numpy.typing import NDArray

from ddpc_cli.controllers.base import DataDrivenController
from ddpc_cli.controllers.spec import ControlSpec, ControlStep
from ddpc_cli.exceptions import ConfigError
from ddpc_cli.predictor.data import InitialCondition, PredictorData, solve_gamma1
from ddpc_cli.qp.admm import SolverSettings


class GammaDDPC(DataDrivenController):
    """
    u_f = L21 g1 + L22 g2 and y_f = L31 g1 + L32 g2 with g1 = L11^-1 z_init.

    ``beta`` adds beta ||g2||^2 to the cost; beta = 0 is the plain scheme.
    """

    scheme = "gamma_ddpc"

    def __init__(
        self,
        pd: PredictorData,
        spec: ControlSpec,
        beta: float = 0.0,
        settings: SolverSettings | None = None,
    ) -> None:
        if beta < 0.0:
            raise ConfigError(f"beta must be nonnegative, got {beta}", key="beta")
        self.beta = beta
        super().__init__(pd, spec, settings)

    def input_map(self) -> NDArray[np.float64]:
        return self.pd.lq.l22

    def output_map(self) -> NDArray[np.float64]:
        return self.pd.lq.l32

    def offsets(
        self, context: NDArray[np.float64]
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        gamma1 = solve_gamma1(self.pd, InitialCondition(context))
        return self.pd.lq.l21 @ gamma1, self.pd.lq.l31 @ gamma1

    def penalty_hessian(self) -> NDArray[np.float64]:
        return self.beta * np.eye(self._n)

    def extras(self, x: NDArray[np.float64], context: NDArray[np.float64]) -> dict[str, Any]:
        return {"gamma2_norm": float(np.linalg.norm(x))}


class GammaThreeEta(DataDrivenController):
    """Gamma-DDPC with g3 kept as a decision: y_f gains L33 g3, penalized by eta ||g3||^2."""

    scheme = "gamma_three_eta"

    def __init__(
        self,
        pd: PredictorData,
        spec: ControlSpec,
        eta: float,
        settings: SolverSettings | None = None,
    ) -> None:
        if eta < 0.0:
            raise ConfigError(f"eta must be nonnegative, got {eta}", key="eta")
        self.eta = eta
        super().__init__(pd, spec, settings)

    @property
    def _split(self) -> int:
        return self.pd.m_inputs * self.pd.horizon_T

    def input_map(self) -> NDArray[np.float64]:
        lq = self.pd.lq
        return np.hstack((lq.l22, np.zeros((lq.l22.shape[0], lq.l33.shape[1]))))

    def output_map(self) -> NDArray[np.float64]:
        return np.hstack((self.pd.lq.l32, self.pd.lq.l33))

    def offsets(
        self, context: NDArray[np.float64]
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        gamma1 = solve_gamma1(self.pd, InitialCondition(context))
        return self.pd.lq.l21 @ gamma1, self.pd.lq.l31 @ gamma1

    def penalty_hessian(self) -> NDArray[np.float64]:
        weight = np.zeros(self._n)
        weight[self._split :] = self.eta
        return np.diag(weight)

    def extras(self, x: NDArray[np.float64], context: NDArray[np.float64]) -> dict[str, Any]:
        return {
            "gamma2_norm": float(np.linalg.norm(x[: self._split])),
            "gamma3_norm": float(np.linalg.norm(x[self._split :])),
        }


def gamma_ddpc_step(pd: PredictorData, spec: ControlSpec, init: InitialCondition) -> ControlStep:
    return GammaDDPC(pd, spec).step(init)


def gamma_ddpc_beta_step(
    pd: PredictorData, spec: ControlSpec, init: InitialCondition, beta: float
) -> ControlStep:
    return GammaDDPC(pd, spec, beta=beta).step(init)


def gamma_three_eta_step(
    pd: PredictorData, spec: ControlSpec, init: InitialCondition, eta: float
) -> ControlStep:
    return GammaThreeEta(pd, spec, eta=eta).step(init)
