"""Schemes optimizing over the data-column combination alpha (length N)."""

from __future__ import annotations

from abc import abstractmethod
from functools import cached_property
from typing import Any, ClassVar

import numpy as np
from numpy.typing import NDArray

from ddpc_cli.controllers.base import DataDrivenController
from ddpc_cli.controllers.spec import ControlSpec, ControlStep
from ddpc_cli.exceptions import ConfigError
from ddpc_cli.predictor.data import InitialCondition, PredictorData
from ddpc_cli.qp.admm import SolverSettings
from ddpc_cli.qp.problem import QpProblem, reformulate_l1

SLACK_DOMINANT_RTOL = 1e-3


def _nonnegative(value: float, key: str) -> float:
    if value < 0.0:
        raise ConfigError(f"{key} must be nonnegative, got {value}", key=key)
    return value


def output_slack_selector(pd: PredictorData) -> NDArray[np.float64]:
    """S_y placing rho p output slacks on the y entries of the interleaved z_init."""
    m, p, rho = pd.m_inputs, pd.p_outputs, pd.rho
    selector = np.zeros((pd.past_rows, p * rho))
    for k in range(rho):
        for j in range(p):
            selector[k * (m + p) + m + j, k * p + j] = 1.0
    return selector


class _AlphaController(DataDrivenController):
    """Decision vector of stacked blocks ending with [u_f; y_f]."""

    @abstractmethod
    def _blocks(self) -> list[int]:
        """Sizes of the decision blocks, the last two being u_f and y_f."""

    def _offset(self, index: int) -> int:
        return int(sum(self._blocks()[:index]))

    def _select(self, index: int) -> NDArray[np.float64]:
        sizes = self._blocks()
        out = np.zeros((sizes[index], sum(sizes)))
        start = self._offset(index)
        out[:, start : start + sizes[index]] = np.eye(sizes[index])
        return out

    def input_map(self) -> NDArray[np.float64]:
        return self._select(len(self._blocks()) - 2)

    def output_map(self) -> NDArray[np.float64]:
        return self._select(len(self._blocks()) - 1)

    def offsets(
        self, context: NDArray[np.float64]
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return np.zeros(self._mu.shape[0]), np.zeros(self._my.shape[0])

    @property
    def n_alpha(self) -> int:
        return self.pd.n_cols

    def _alpha_extras(self, alpha: NDArray[np.float64]) -> dict[str, Any]:
        return {
            "alpha_norm": float(np.linalg.norm(alpha)),
            "alpha_l1": float(np.abs(alpha).sum()),
        }


class Berberich(_AlphaController):
    """
    Bounded-noise regularized DDPC over x = [alpha; sigma_init; sigma_y; u_f; y_f]:

        Z_P alpha = z_init + S_y sigma_init,  U_F alpha = u_f,  Y_F alpha = y_f + sigma_y

    with cost bar_lambda_alpha ||alpha||^2 + lambda_sigma ||[sigma_init; sigma_y]||^2.
    ``null_output_slack`` adds sigma_y = Y_F (I - Pi) alpha.
    """

    scheme = "berberich"
    default_settings: ClassVar[SolverSettings] = SolverSettings(max_iter=200_000)

    def __init__(
        self,
        pd: PredictorData,
        spec: ControlSpec,
        bar_lambda_alpha: float,
        lambda_sigma: float,
        null_output_slack: bool = False,
        settings: SolverSettings | None = None,
    ) -> None:
        self.bar_lambda_alpha = _nonnegative(bar_lambda_alpha, "bar_lambda_alpha")
        self.lambda_sigma = _nonnegative(lambda_sigma, "lambda_sigma")
        self.null_output_slack = null_output_slack
        super().__init__(pd, spec, settings)

    def _blocks(self) -> list[int]:
        pd = self.pd
        p_t = pd.p_outputs * pd.horizon_T
        return [pd.n_cols, pd.p_outputs * pd.rho, p_t, pd.m_inputs * pd.horizon_T, p_t]

    def equality_matrix(self) -> NDArray[np.float64]:
        h = self.pd.hankel
        alpha, s_init, s_y, u, y = (self._select(i) for i in range(5))
        rows = [
            h.z_past @ alpha - output_slack_selector(self.pd) @ s_init,
            h.u_future @ alpha - u,
            h.y_future @ alpha - s_y - y,
        ]
        if self.null_output_slack:
            rows.append(s_y - (h.y_future - self.pd.y_hat_f) @ alpha)
        return np.vstack(rows)

    def equality_rhs(self, context: NDArray[np.float64]) -> NDArray[np.float64]:
        n_zero = self._equality_rows - context.shape[0]
        return np.concatenate((context, np.zeros(n_zero)))

    @property
    def _equality_rows(self) -> int:
        pd = self.pd
        rows = pd.past_rows + (pd.m_inputs + pd.p_outputs) * pd.horizon_T
        return rows + (pd.p_outputs * pd.horizon_T if self.null_output_slack else 0)

    def penalty_hessian(self) -> NDArray[np.float64]:
        sizes = self._blocks()
        diagonal = np.concatenate(
            (
                np.full(sizes[0], self.bar_lambda_alpha),
                np.full(sizes[1] + sizes[2], self.lambda_sigma),
                np.zeros(sizes[3] + sizes[4]),
            )
        )
        return np.diag(diagonal)

    def extras(self, x: NDArray[np.float64], context: NDArray[np.float64]) -> dict[str, Any]:
        sizes = self._blocks()
        alpha = x[: sizes[0]]
        s_init = x[sizes[0] : sizes[0] + sizes[1]]
        s_y = x[sizes[0] + sizes[1] : sizes[0] + sizes[1] + sizes[2]]
        sigma_norm = float(np.hypot(np.linalg.norm(s_init), np.linalg.norm(s_y)))
        return {
            **self._alpha_extras(alpha),
            "sigma_norm": sigma_norm,
            "sigma_init_norm": float(np.linalg.norm(s_init)),
            "sigma_y_norm": float(np.linalg.norm(s_y)),
            "slack_dominant": sigma_norm
            > SLACK_DOMINANT_RTOL * max(1.0, float(np.linalg.norm(context))),
        }


class ElasticNet(_AlphaController):
    """
    DeePC with the exact data equation [Z_P; U_F; Y_F] alpha = [z_init; u_f; y_f] and the
    cost lambda1 ||alpha||_1 + lambda2 ||(I - Pi) alpha||^2.

    The QP runs over x = [a; b; u_f; y_f] with alpha = P'a + N'b, where the rows of P span
    the row space of [Z_P; U_F] and the rows of N its complement. Then [Z_P; U_F] N' = 0
    and the lambda2 term is the diagonal lambda2 ||b||^2.
    """

    scheme = "elastic_net"
    default_settings: ClassVar[SolverSettings] = SolverSettings(max_iter=200_000)

    def __init__(
        self,
        pd: PredictorData,
        spec: ControlSpec,
        lambda1: float,
        lambda2: float,
        settings: SolverSettings | None = None,
    ) -> None:
        self.lambda1 = _nonnegative(lambda1, "lambda1")
        self.lambda2 = _nonnegative(lambda2, "lambda2")
        super().__init__(pd, spec, settings)

    def _blocks(self) -> list[int]:
        pd = self.pd
        rank = pd.row_split[0].shape[0]
        return [
            rank,
            pd.n_cols - rank,
            pd.m_inputs * pd.horizon_T,
            pd.p_outputs * pd.horizon_T,
        ]

    @cached_property
    def _alpha_map(self) -> NDArray[np.float64]:
        """Matrix taking the decision vector to alpha."""
        basis, complement = self.pd.row_split
        return basis.T @ self._select(0) + complement.T @ self._select(1)

    def equality_matrix(self) -> NDArray[np.float64]:
        h = self.pd.hankel
        basis, _ = self.pd.row_split
        a, u, y = self._select(0), self._select(2), self._select(3)
        return np.vstack(
            (
                h.z_past @ basis.T @ a,
                h.u_future @ basis.T @ a - u,
                h.y_future @ self._alpha_map - y,
            )
        )

    def equality_rhs(self, context: NDArray[np.float64]) -> NDArray[np.float64]:
        sizes = self._blocks()
        return np.concatenate((context, np.zeros(sizes[2] + sizes[3])))

    def penalty_hessian(self) -> NDArray[np.float64]:
        sizes = self._blocks()
        diagonal = np.zeros(self._n)
        diagonal[sizes[0] : sizes[0] + sizes[1]] = self.lambda2
        return np.diag(diagonal)

    def augment(self, problem: QpProblem) -> QpProblem:
        if self.lambda1 == 0.0:
            return problem
        return reformulate_l1(problem, self.lambda1, self._alpha_map)

    def extras(self, x: NDArray[np.float64], context: NDArray[np.float64]) -> dict[str, Any]:
        sizes = self._blocks()
        basis, complement = self.pd.row_split
        a, b = x[: sizes[0]], x[sizes[0] : sizes[0] + sizes[1]]
        return {
            **self._alpha_extras(basis.T @ a + complement.T @ b),
            "projection_residual": float(np.linalg.norm(b)),
        }


def berberich_step(
    pd: PredictorData,
    spec: ControlSpec,
    init: InitialCondition,
    bar_lambda_alpha: float,
    lambda_sigma: float,
    null_output_slack: bool = False,
) -> ControlStep:
    return Berberich(pd, spec, bar_lambda_alpha, lambda_sigma, null_output_slack).step(init)


def elastic_net_step(
    pd: PredictorData,
    spec: ControlSpec,
    init: InitialCondition,
    lambda1: float,
    lambda2: float,
) -> ControlStep:
    return ElasticNet(pd, spec, lambda1, lambda2).step(init)
