"""Model-based MPC with the true plant matrices, used as the performance baseline."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ddpc_cli.controllers.base import QpController
from ddpc_cli.controllers.spec import ControlSpec, ControlStep
from ddpc_cli.exceptions import ShapeError
from ddpc_cli.plant.system import LinearSystem, as_state
from ddpc_cli.qp.admm import SolverSettings


class OracleMPC(QpController):
    """Condensed MPC over u_f with y_f = Gamma x_hat + H_d u_f."""

    scheme = "oracle_mpc"

    def __init__(
        self,
        system: LinearSystem,
        spec: ControlSpec,
        settings: SolverSettings | None = None,
    ) -> None:
        if (spec.m_inputs, spec.p_outputs) != (system.m_inputs, system.p_outputs):
            raise ShapeError("Controller weights do not match the plant dimensions")
        self.system = system
        self._gamma = system.observability_matrix(spec.horizon_T)
        self._toeplitz = system.toeplitz_matrix(spec.horizon_T)
        super().__init__(spec, settings)

    def input_map(self) -> NDArray[np.float64]:
        return np.eye(self.system.m_inputs * self.spec.horizon_T)

    def output_map(self) -> NDArray[np.float64]:
        return self._toeplitz

    def offsets(
        self, context: NDArray[np.float64]
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return np.zeros(self._n), self._gamma @ context

    def step(self, x_hat: ArrayLike) -> ControlStep:
        return self._solve(as_state(x_hat, self.system))


def oracle_mpc_step(system: LinearSystem, spec: ControlSpec, x_hat: ArrayLike) -> ControlStep:
    return OracleMPC(system, spec).step(x_hat)
