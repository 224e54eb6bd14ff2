"""Operator-splitting QP solver with equilibration, adaptive rho and solution polish."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from numpy.typing import NDArray

from ddpc_cli.qp.kkt import RegularizedKkt, Scaling, ruiz_equilibrate
from ddpc_cli.qp.problem import INFINITY, QpProblem, QpSolution, QpStatus

logger = logging.getLogger(__name__)

RHO_MIN = 1e-6
RHO_MAX = 1e6
RHO_EQ_FACTOR = 1e3
EQ_TOL = 1e-4

FREE, EQUALITY, INEQUALITY = 0, 1, 2


@dataclass(frozen=True)
class SolverSettings:
    tol: float = 1e-8
    max_iter: int = 50_000
    rho: float = 0.1
    sigma: float = 1e-6
    alpha: float = 1.6
    scaling_iter: int = 10
    check_interval: int = 10
    adaptive_rho_interval: int = 50
    adaptive_rho_tolerance: float = 5.0
    eps_infeasible: float = 1e-6
    polish: bool = True
    polish_level: float = 1e-5
    polish_rounds: int = 25
    delta: float = 1e-9
    refine_iter: int = 10
    direct: bool = True


@dataclass
class _Residuals:
    primal: float
    dual: float
    primal_scale: float
    dual_scale: float

    def within(self, tol: float) -> bool:
        return self.primal <= tol * (1.0 + self.primal_scale) and self.dual <= tol * (
            1.0 + self.dual_scale
        )


class AdmmSolver:
    """
    ADMM on the stacked form l <= A x <= u with the equality rows first.

    The matrices are scaled and factored once; :meth:`update` only swaps the cost
    vector and the bounds, so a controller reuses one solver across all its steps.
    Every :meth:`solve` starts cold.

    Before iterating, the equality-constrained problem that ignores the inequality
    rows is solved directly; when that point satisfies every inequality it is
    optimal and returned with ``iterations == 0``.
    """

    def __init__(self, problem: QpProblem, settings: SolverSettings | None = None):
        self.settings = settings or SolverSettings()
        self.problem = problem
        a, _, _ = problem.stacked_constraints()
        self._a = a
        self._n = problem.n_variables
        self._m = a.shape[0]
        self._n_eq = problem.n_eq

        self._scaling: Scaling = ruiz_equilibrate(problem.h, a, self.settings.scaling_iter)
        sc = self._scaling
        self._p_s = sc.c * (sc.d[:, None] * problem.h * sc.d[None, :])
        self._a_s = sc.e[:, None] * a * sc.d[None, :]

        self._rho = self.settings.rho
        self._kinds: NDArray[np.int_] | None = None
        self._factor: tuple[NDArray[np.float64], bool] | None = None
        self._direct_kkt: RegularizedKkt | None = None
        self._set_vectors()

    # -- problem data -----------------------------------------------------------------

    def update(
        self,
        f: NDArray[np.float64] | None = None,
        b_eq: NDArray[np.float64] | None = None,
        lb: NDArray[np.float64] | None = None,
        ub: NDArray[np.float64] | None = None,
        constant: float | None = None,
    ) -> None:
        """Replace vectors of the problem; matrices and factorizations are kept."""
        self.problem = self.problem.with_vectors(f=f, b_eq=b_eq, lb=lb, ub=ub, constant=constant)
        self._set_vectors()

    def _set_vectors(self) -> None:
        _, lower, upper = self.problem.stacked_constraints()
        sc = self._scaling
        self._lower_inf = lower <= -INFINITY
        self._upper_inf = upper >= INFINITY
        self._q_s = sc.c * sc.d * self.problem.f
        self._l_s = np.where(self._lower_inf, -INFINITY, sc.e * lower)
        self._u_s = np.where(self._upper_inf, INFINITY, sc.e * upper)

        kinds = np.full(self._m, INEQUALITY)
        kinds[self._lower_inf & self._upper_inf] = FREE
        kinds[np.abs(self._u_s - self._l_s) < EQ_TOL] = EQUALITY
        if self._kinds is None or not np.array_equal(kinds, self._kinds):
            self._kinds = kinds
            self._factor = None

    def _rho_vector(self) -> NDArray[np.float64]:
        assert self._kinds is not None
        rho = np.full(self._m, self._rho)
        rho[self._kinds == FREE] = RHO_MIN
        rho[self._kinds == EQUALITY] = self._rho * RHO_EQ_FACTOR
        return np.clip(rho, RHO_MIN, RHO_MAX)

    def _refactor(self) -> None:
        self._rho_vec = self._rho_vector()
        kkt = self._p_s + self.settings.sigma * np.eye(self._n)
        kkt += self._a_s.T @ (self._rho_vec[:, None] * self._a_s)
        self._factor = la.cho_factor(kkt, check_finite=False)

    # -- solve ------------------------------------------------------------------------

    def solve(self) -> QpSolution:
        if self.settings.direct:
            direct = self._solve_direct()
            if direct is not None:
                logger.debug("QP solved directly (n=%d)", self._n)
                return direct
        solution = self._iterate()
        logger.debug(
            "QP %s after %d iterations (pri %.2e, dua %.2e)",
            solution.status,
            solution.iterations,
            solution.primal_residual,
            solution.dual_residual,
        )
        return solution

    def _solve_direct(self) -> QpSolution | None:
        s = self.settings
        if self._direct_kkt is None:
            self._direct_kkt = RegularizedKkt(self._p_s, self._a_s[: self._n_eq], s.delta)
        rhs = np.concatenate((-self._q_s, self._l_s[: self._n_eq]))
        sol = self._direct_kkt.solve(rhs, s.refine_iter)
        if not np.all(np.isfinite(sol)):
            return None
        x = sol[: self._n]
        y = np.concatenate((sol[self._n :], np.zeros(self._m - self._n_eq)))
        z = np.clip(self._a_s @ x, self._l_s, self._u_s)
        if not self._residuals(x, z, y).within(s.tol):
            return None
        return self._package(x, z, y, "optimal", iterations=0, polished=False)

    def _iterate(self) -> QpSolution:
        s = self.settings
        n, m = self._n, self._m
        x, z, y = np.zeros(n), np.zeros(m), np.zeros(m)
        if self._factor is None:
            self._refactor()
        polish_level = s.polish_level

        for iteration in range(1, s.max_iter + 1):
            x_prev, y_prev = x, y
            rhs = s.sigma * x - self._q_s + self._a_s.T @ (self._rho_vec * z - y)
            assert self._factor is not None
            x_tilde = la.cho_solve(self._factor, rhs, check_finite=False)
            z_tilde = self._a_s @ x_tilde
            x = s.alpha * x_tilde + (1.0 - s.alpha) * x_prev
            z_relaxed = s.alpha * z_tilde + (1.0 - s.alpha) * z
            z = np.clip(z_relaxed + y / self._rho_vec, self._l_s, self._u_s)
            y = y + self._rho_vec * (z_relaxed - z)

            if iteration % s.check_interval:
                continue

            res = self._residuals(x, z, y)
            if res.within(s.tol):
                polished = self._polish(x, z, y, iteration) if s.polish else None
                return polished or self._package(x, z, y, "optimal", iteration, polished=False)
            if s.polish and res.within(polish_level):
                polished = self._polish(x, z, y, iteration)
                if polished is not None:
                    return polished
                polish_level *= 0.1

            certificate = self._primal_certificate(y - y_prev)
            if certificate is not None:
                return self._package(
                    x, z, y, "infeasible", iteration, certificate=("primal", certificate)
                )
            certificate = self._dual_certificate(x - x_prev)
            if certificate is not None:
                return self._package(
                    x, z, y, "infeasible", iteration, certificate=("dual", certificate)
                )

            if iteration % s.adaptive_rho_interval == 0:
                self._adapt_rho(x, z, y)

        if s.polish:
            polished = self._polish(x, z, y, s.max_iter)
            if polished is not None:
                return polished
        return self._package(x, z, y, "max-iterations", s.max_iter, polished=False)

    # -- termination ------------------------------------------------------------------

    def _residuals(
        self, x: NDArray[np.float64], z: NDArray[np.float64], y: NDArray[np.float64]
    ) -> _Residuals:
        """Residuals of the unscaled problem."""
        sc = self._scaling
        ax = sc.e_inv * (self._a_s @ x)
        z_u = sc.e_inv * z
        px = sc.d_inv * (self._p_s @ x) / sc.c
        aty = sc.d_inv * (self._a_s.T @ y) / sc.c
        q = sc.d_inv * self._q_s / sc.c

        def norm(v: NDArray[np.float64]) -> float:
            return float(np.max(np.abs(v), initial=0.0))

        return _Residuals(
            primal=norm(ax - z_u),
            dual=norm(px + q + aty),
            primal_scale=max(norm(ax), norm(z_u)),
            dual_scale=max(norm(px), norm(aty), norm(q)),
        )

    def _primal_certificate(self, delta_y: NDArray[np.float64]) -> float | None:
        """||A' dy|| when dy certifies l <= A x <= u has no solution."""
        eps = self.settings.eps_infeasible
        dy = delta_y.copy()
        dy[self._upper_inf] = np.minimum(dy[self._upper_inf], 0.0)
        dy[self._lower_inf] = np.maximum(dy[self._lower_inf], 0.0)
        norm = float(np.max(np.abs(dy), initial=0.0))
        if norm <= eps:
            return None
        dy /= norm
        support = float(
            np.where(self._upper_inf, 0.0, self._u_s * np.maximum(dy, 0.0)).sum()
            + np.where(self._lower_inf, 0.0, self._l_s * np.minimum(dy, 0.0)).sum()
        )
        if support >= -eps:
            return None
        residual = float(np.max(np.abs(self._scaling.d_inv * (self._a_s.T @ dy)), initial=0.0))
        return residual if residual < eps else None

    def _dual_certificate(self, delta_x: NDArray[np.float64]) -> float | None:
        """||P dx|| when dx is a descent direction of unbounded cost."""
        eps = self.settings.eps_infeasible
        norm = float(np.max(np.abs(delta_x), initial=0.0))
        if norm <= eps:
            return None
        dx = delta_x / norm
        if float(self._q_s @ dx) >= -eps:
            return None
        sc = self._scaling
        residual = float(np.max(np.abs(sc.d_inv * (self._p_s @ dx)), initial=0.0))
        if residual >= eps:
            return None
        adx = sc.e_inv * (self._a_s @ dx)
        if np.any(~self._upper_inf & (adx > eps)) or np.any(~self._lower_inf & (adx < -eps)):
            return None
        return residual

    def _adapt_rho(
        self, x: NDArray[np.float64], z: NDArray[np.float64], y: NDArray[np.float64]
    ) -> None:
        tiny = 1e-30
        ax = self._a_s @ x
        px = self._p_s @ x
        aty = self._a_s.T @ y
        pri = np.max(np.abs(ax - z), initial=0.0) / max(
            np.max(np.abs(ax), initial=0.0), np.max(np.abs(z), initial=0.0), tiny
        )
        dua = np.max(np.abs(px + self._q_s + aty), initial=0.0) / max(
            np.max(np.abs(px), initial=0.0),
            np.max(np.abs(aty), initial=0.0),
            np.max(np.abs(self._q_s), initial=0.0),
            tiny,
        )
        new_rho = float(np.clip(self._rho * np.sqrt(pri / max(dua, tiny)), RHO_MIN, RHO_MAX))
        ratio = new_rho / self._rho
        tolerance = self.settings.adaptive_rho_tolerance
        if ratio > tolerance or ratio < 1.0 / tolerance:
            self._rho = new_rho
            self._refactor()

    # -- polish -----------------------------------------------------------------------

    def _polish(
        self,
        x: NDArray[np.float64],
        z: NDArray[np.float64],
        y: NDArray[np.float64],
        iterations: int,
    ) -> QpSolution | None:
        """
        Solve the equality-constrained QP on the guessed active set.

        Rows violated by the candidate are added to the set and rows whose multiplier
        has the wrong sign are dropped, until the guess is consistent.
        """
        s = self.settings
        assert self._kinds is not None
        eq = self._kinds == EQUALITY
        low = ~eq & ~self._lower_inf & (z - self._l_s < -y)
        upp = ~eq & ~self._upper_inf & (self._u_s - z < y)
        feas = s.tol * (1.0 + np.minimum(np.abs(np.where(self._lower_inf, 0.0, self._l_s)), 1e12))
        feas_u = s.tol * (1.0 + np.minimum(np.abs(np.where(self._upper_inf, 0.0, self._u_s)), 1e12))

        for _ in range(s.polish_rounds):
            active = eq | low | upp
            rows = np.flatnonzero(active)
            target = np.where(upp, self._u_s, self._l_s)[rows]
            kkt = RegularizedKkt(self._p_s, self._a_s[rows], s.delta)
            sol = kkt.solve(np.concatenate((-self._q_s, target)), s.refine_iter)
            if not np.all(np.isfinite(sol)):
                return None
            x_p = sol[: self._n]
            y_p = np.zeros(self._m)
            y_p[rows] = sol[self._n :]
            ax = self._a_s @ x_p

            violated_low = ~active & ~self._lower_inf & (ax < self._l_s - feas)
            violated_upp = ~active & ~self._upper_inf & (ax > self._u_s + feas_u)
            sign_tol = s.tol * max(1.0, float(np.max(np.abs(y_p), initial=0.0)))
            wrong_low = low & (y_p > sign_tol)
            wrong_upp = upp & (y_p < -sign_tol)
            if not (violated_low.any() or violated_upp.any() or wrong_low.any() or wrong_upp.any()):
                y_p[low] = np.minimum(y_p[low], 0.0)
                y_p[upp] = np.maximum(y_p[upp], 0.0)
                z_p = np.clip(ax, self._l_s, self._u_s)
                if not self._residuals(x_p, z_p, y_p).within(s.tol):
                    return None
                return self._package(x_p, z_p, y_p, "optimal", iterations, polished=True)
            low = (low & ~wrong_low) | violated_low
            upp = (upp & ~wrong_upp) | violated_upp
        return None

    # -- output -----------------------------------------------------------------------

    def _package(
        self,
        x_s: NDArray[np.float64],
        z_s: NDArray[np.float64],
        y_s: NDArray[np.float64],
        status: QpStatus,
        iterations: int,
        polished: bool = False,
        certificate: tuple[str, float] | None = None,
    ) -> QpSolution:
        sc = self._scaling
        x = sc.d * x_s
        y = sc.e * y_s / sc.c
        res = self._residuals(x_s, z_s, y_s)
        return QpSolution(
            x=x,
            objective=self.problem.objective(x),
            status=status,
            iterations=iterations,
            primal_residual=res.primal,
            dual_residual=res.dual,
            dual_eq=y[: self._n_eq],
            dual_in=y[self._n_eq :],
            certificate=None if certificate is None else certificate[0],
            certificate_residual=None if certificate is None else certificate[1],
            polished=polished,
        )


def solve(p: QpProblem, tol: float = 1e-8, max_iter: int = 50_000) -> QpSolution:
    """Solve one QP with default settings at the given tolerance."""
    return AdmmSolver(p, SolverSettings(tol=tol, max_iter=max_iter)).solve()
