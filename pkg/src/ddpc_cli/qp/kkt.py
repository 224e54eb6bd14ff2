"""Equilibration and regularized KKT solves shared by the ADMM iteration and the polish."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from numpy.typing import NDArray

MIN_SCALING = 1e-4
MAX_SCALING = 1e4


@dataclass(frozen=True)
class Scaling:
    """x = D x_s, constraint rows E A D, cost c (1/2 x'Px + q'x)."""

    d: NDArray[np.float64]
    e: NDArray[np.float64]
    c: float

    @property
    def d_inv(self) -> NDArray[np.float64]:
        return 1.0 / self.d

    @property
    def e_inv(self) -> NDArray[np.float64]:
        return 1.0 / self.e


def _clip_norms(norms: NDArray[np.float64]) -> NDArray[np.float64]:
    out = np.where(norms < MIN_SCALING, 1.0, norms)
    return np.clip(out, MIN_SCALING, MAX_SCALING)


def ruiz_equilibrate(p: NDArray[np.float64], a: NDArray[np.float64], iterations: int) -> Scaling:
    """
    Modified Ruiz equilibration of the KKT matrix [[P, A'], [A, 0]] in the inf-norm.

    The cost scaling depends on P only, so the result stays valid when q or the
    bounds change between solves.
    """
    n, m = p.shape[0], a.shape[0]
    d = np.ones(n)
    e = np.ones(m)
    p_s, a_s = p.copy(), a.copy()
    for _ in range(iterations):
        p_cols = np.max(np.abs(p_s), axis=0, initial=0.0)
        a_cols = np.max(np.abs(a_s), axis=0, initial=0.0)
        a_rows = np.max(np.abs(a_s), axis=1, initial=0.0)
        col_norms = np.concatenate((np.maximum(p_cols, a_cols), a_rows))
        step = 1.0 / np.sqrt(_clip_norms(col_norms))
        d_step, e_step = step[:n], step[n:]
        p_s = d_step[:, None] * p_s * d_step[None, :]
        a_s = e_step[:, None] * a_s * d_step[None, :]
        d *= d_step
        e *= e_step

    mean_p = float(np.mean(np.max(np.abs(p_s), axis=0, initial=0.0))) if n else 0.0
    c = 1.0 / float(_clip_norms(np.array([mean_p]))[0])
    return Scaling(d=d, e=e, c=c)


class RegularizedKkt:
    """
    LU factor of the quasi-definite matrix [[P + delta I, A'], [A, -delta I]].

    Solves are refined against the unregularized KKT matrix, so for consistent
    systems the regularization only affects convergence speed.
    """

    def __init__(self, p: NDArray[np.float64], a: NDArray[np.float64], delta: float):
        self.p = p
        self.a = a
        n, m = p.shape[0], a.shape[0]
        matrix = np.block(
            [
                [p + delta * np.eye(n), a.T],
                [a, -delta * np.eye(m)],
            ]
        )
        self._lu = la.lu_factor(matrix, check_finite=False)

    @property
    def n(self) -> int:
        return int(self.p.shape[0])

    def apply(self, sol: NDArray[np.float64]) -> NDArray[np.float64]:
        x, y = sol[: self.n], sol[self.n :]
        return np.concatenate((self.p @ x + self.a.T @ y, self.a @ x))

    def solve(self, rhs: NDArray[np.float64], refine_iter: int) -> NDArray[np.float64]:
        sol = la.lu_solve(self._lu, rhs, check_finite=False)
        scale = max(1.0, float(np.max(np.abs(rhs), initial=0.0)))
        for _ in range(refine_iter):
            residual = rhs - self.apply(sol)
            if float(np.max(np.abs(residual), initial=0.0)) <= 1e-15 * scale:
                break
            sol = sol + la.lu_solve(self._lu, residual, check_finite=False)
        return sol
