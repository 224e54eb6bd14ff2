"""Shared cost and constraint assembly of the receding-horizon QPs.

Every scheme exposes its decision vector x through affine maps

    u_f = M_u x + c_u(context),    y_f = M_y x + c_y(context)

with static M_u, M_y and context-dependent offsets (context being z_init for the
data-driven schemes and the state estimate for the model-based one). The QP objective
equals the predicted cost sum ||y - y_r||_Q^2 + ||u - u_r||_R^2 plus the scheme penalty
x'Wx + 2w'x + w0.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import Any, ClassVar

import numpy as np
from numpy.typing import NDArray

from ddpc_cli.controllers.spec import ControlSpec, ControlStep
from ddpc_cli.exceptions import ShapeError, SolverError
from ddpc_cli.predictor.data import InitialCondition, PredictorData
from ddpc_cli.qp.admm import AdmmSolver, SolverSettings
from ddpc_cli.qp.problem import QpProblem, QpSolution

logger = logging.getLogger(__name__)


class QpController(ABC):
    """Builds and factors the scheme QP once; :meth:`_solve` refreshes its vectors per step."""

    scheme: ClassVar[str] = ""
    default_settings: ClassVar[SolverSettings] = SolverSettings()

    def __init__(self, spec: ControlSpec, settings: SolverSettings | None = None) -> None:
        self.spec = spec
        self.settings = settings or self.default_settings

        mu, my = self.input_map(), self.output_map()
        n = mu.shape[1]
        if my.shape[1] != n:
            raise ShapeError("Input and output maps act on different decision vectors")
        self._mu, self._my = mu, my
        self._n = n
        self._q_bar, self._r_bar = spec.q_bar, spec.r_bar
        self._q_my = self._q_bar @ my
        self._r_mu = self._r_bar @ mu
        quad = my.T @ self._q_my + mu.T @ self._r_mu + self.penalty_hessian()
        quad = 0.5 * (quad + quad.T)

        self._u_ref = spec.stacked(spec.u_ref)
        self._y_ref = spec.stacked(spec.y_ref)
        self._u_min, self._u_max = spec.stacked(spec.u_min), spec.stacked(spec.u_max)
        self._y_min, self._y_max = spec.stacked(spec.y_min), spec.stacked(spec.y_max)
        self._u_rows = np.flatnonzero(np.isfinite(self._u_min) | np.isfinite(self._u_max))
        self._y_rows = np.flatnonzero(np.isfinite(self._y_min) | np.isfinite(self._y_max))

        m, p, T, rho = spec.m_inputs, spec.p_outputs, spec.horizon_T, spec.rho
        if spec.terminal_constraint:
            self._u_term = np.arange((T - rho) * m, T * m)
            self._y_term = np.arange((T - rho) * p, T * p)
        else:
            self._u_term = np.zeros(0, dtype=int)
            self._y_term = np.zeros(0, dtype=int)

        a_eq = np.vstack((self.equality_matrix(), mu[self._u_term], my[self._y_term]))
        a_in = np.vstack((mu[self._u_rows], my[self._y_rows]))
        base = QpProblem.build(2.0 * quad, np.zeros(n), a_eq=a_eq, a_in=a_in)
        problem = self.augment(base)
        self._tail_f = problem.f[n:]
        self._tail_b = problem.b_eq[base.n_eq :]
        self._tail_lb = problem.lb[base.n_in :]
        self._tail_ub = problem.ub[base.n_in :]
        self.solver = AdmmSolver(problem, self.settings)

    # -- scheme hooks -----------------------------------------------------------------

    @abstractmethod
    def input_map(self) -> NDArray[np.float64]:
        """M_u, shape (mT, n)."""

    @abstractmethod
    def output_map(self) -> NDArray[np.float64]:
        """M_y, shape (pT, n)."""

    @abstractmethod
    def offsets(
        self, context: NDArray[np.float64]
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """(c_u, c_y) for the current context."""

    def penalty_hessian(self) -> NDArray[np.float64]:
        return np.zeros((self._n, self._n))

    def penalty_linear(self, context: NDArray[np.float64]) -> tuple[NDArray[np.float64], float]:
        return np.zeros(self._n), 0.0

    def equality_matrix(self) -> NDArray[np.float64]:
        return np.zeros((0, self._n))

    def equality_rhs(self, context: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.zeros(0)

    def augment(self, problem: QpProblem) -> QpProblem:
        return problem

    def extras(self, x: NDArray[np.float64], context: NDArray[np.float64]) -> dict[str, Any]:
        return {}

    @property
    def n_alpha(self) -> int:
        """Length of the data-column combination vector, 0 when it is not a decision."""
        return 0

    # -- solve ------------------------------------------------------------------------

    def _solve(self, context: NDArray[np.float64]) -> ControlStep:
        cu, cy = self.offsets(context)
        w, w0 = self.penalty_linear(context)
        eu, ey = cu - self._u_ref, cy - self._y_ref
        g = self._q_my.T @ ey + self._r_mu.T @ eu + w
        constant = float(ey @ self._q_bar @ ey + eu @ self._r_bar @ eu + w0)

        b_eq = np.concatenate(
            (
                self.equality_rhs(context),
                self._u_ref[self._u_term] - cu[self._u_term],
                self._y_ref[self._y_term] - cy[self._y_term],
                self._tail_b,
            )
        )
        lb = np.concatenate(
            (
                self._u_min[self._u_rows] - cu[self._u_rows],
                self._y_min[self._y_rows] - cy[self._y_rows],
                self._tail_lb,
            )
        )
        ub = np.concatenate(
            (
                self._u_max[self._u_rows] - cu[self._u_rows],
                self._y_max[self._y_rows] - cy[self._y_rows],
                self._tail_ub,
            )
        )
        self.solver.update(
            f=np.concatenate((2.0 * g, self._tail_f)), b_eq=b_eq, lb=lb, ub=ub, constant=constant
        )
        solution = self.solver.solve()
        if not solution.optimal:
            raise SolverError(
                f"{self.scheme} QP ended with status {solution.status}",
                status=solution.status,
                iterations=solution.iterations,
            )

        x = solution.x[: self._n]
        u_plan = self._mu @ x + cu
        y_plan = self._my @ x + cy
        return ControlStep(
            u_first=u_plan[: self.spec.m_inputs].copy(),
            u_plan=u_plan,
            y_plan=y_plan,
            solver_stats=self._stats(solution),
            decision_extras=self.extras(solution.x, context),
        )

    def _stats(self, solution: QpSolution) -> dict[str, Any]:
        return {
            "scheme": self.scheme,
            "n_variables": self.solver.problem.n_variables,
            "n_alpha": self.n_alpha,
            "objective": solution.objective,
            **solution.summary(),
        }


class DataDrivenController(QpController):
    """A scheme driven by the shared predictor and the measured z_init."""

    def __init__(
        self, pd: PredictorData, spec: ControlSpec, settings: SolverSettings | None = None
    ) -> None:
        if (spec.horizon_T, spec.rho) != (pd.horizon_T, pd.rho):
            raise ShapeError(
                f"Controller horizons (T={spec.horizon_T}, rho={spec.rho}) differ from the "
                f"predictor's (T={pd.horizon_T}, rho={pd.rho})"
            )
        if (spec.m_inputs, spec.p_outputs) != (pd.m_inputs, pd.p_outputs):
            raise ShapeError("Controller weights do not match the data dimensions")
        self.pd = pd
        super().__init__(spec, settings)

    def step(self, init: InitialCondition) -> ControlStep:
        return self._solve(self.pd.z_vector(init))
