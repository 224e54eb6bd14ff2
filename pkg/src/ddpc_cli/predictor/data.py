"""Shared data-driven predictor: projection, projector and the gamma solves."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as la
from numpy.typing import ArrayLike, NDArray

from ddpc_cli.exceptions import NumericalConsistencyError, RankDeficiencyError, ShapeError
from ddpc_cli.linalg.factorization import (
    RANK_RTOL,
    LQFactors,
    lq_decompose,
    min_norm_solve,
    numerical_rank,
    project_rows,
    pseudo_inverse,
    row_space_split,
)
from ddpc_cli.linalg.hankel import HankelSet, as_samples

logger = logging.getLogger(__name__)


def _vector(values: ArrayLike, size: int, name: str) -> NDArray[np.float64]:
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.shape[0] != size:
        raise ShapeError(f"{name} has {v.shape[0]} entries, expected {size}")
    return v


@dataclass(frozen=True)
class InitialCondition:
    """z_init = [z(t-rho); ...; z(t-1)] with z(k) = [u(k); y(k)]."""

    z_init: NDArray[np.float64]

    def __post_init__(self) -> None:
        object.__setattr__(self, "z_init", np.asarray(self.z_init, dtype=float).reshape(-1))

    @classmethod
    def from_history(cls, u_past: ArrayLike, y_past: ArrayLike) -> InitialCondition:
        """Build from the last rho samples, oldest first: u_past (rho, m), y_past (rho, p)."""
        u, y = as_samples(u_past), as_samples(y_past)
        if u.shape[0] != y.shape[0]:
            raise ShapeError(f"Input history has {u.shape[0]} samples, output {y.shape[0]}")
        return cls(np.hstack((u, y)).reshape(-1))

    @classmethod
    def zeros(cls, size: int) -> InitialCondition:
        return cls(np.zeros(size))


@dataclass(frozen=True)
class GammaSolution:
    gamma1: NDArray[np.float64]
    gamma2: NDArray[np.float64]
    alpha_star: NDArray[np.float64] | None = None


@dataclass(frozen=True)
class PredictorData:
    """
    Everything the controllers share, built once from the training batch.

    ``pi`` (N x N) and ``theta`` are only formed when an alpha-based scheme or the
    explicit SPC predictor asks for them.
    """

    hankel: HankelSet
    lq: LQFactors
    y_hat_f: NDArray[np.float64]

    @property
    def n_cols(self) -> int:
        return self.hankel.n_cols

    @property
    def rho(self) -> int:
        return self.hankel.rho

    @property
    def horizon_T(self) -> int:
        return self.hankel.horizon_T

    @property
    def m_inputs(self) -> int:
        return self.hankel.m_inputs

    @property
    def p_outputs(self) -> int:
        return self.hankel.p_outputs

    @property
    def past_rows(self) -> int:
        return self.hankel.past_rows

    @cached_property
    def row_split(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """(P, N): orthonormal rows of the row space of [Z_P; U_F] and of its complement."""
        return row_space_split(self.hankel.past_and_inputs())

    @cached_property
    def pi(self) -> NDArray[np.float64]:
        """Orthogonal projector onto the row space of [Z_P; U_F]."""
        basis, _ = self.row_split
        return basis.T @ basis

    @cached_property
    def theta(self) -> NDArray[np.float64]:
        """Y_hat_F [Z_P; U_F]^+, the explicit multi-step SPC predictor."""
        return self.y_hat_f @ pseudo_inverse(self.hankel.past_and_inputs())

    def spc_matrices(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """(Theta_past, Theta_future) with y_f = Theta_past z_init + Theta_future u_f."""
        return self.theta[:, : self.past_rows], self.theta[:, self.past_rows :]

    def z_vector(self, init: InitialCondition) -> NDArray[np.float64]:
        return _vector(init.z_init, self.past_rows, "z_init")


def build_predictor(
    h: HankelSet, require_full_rank: bool = True, consistency_rtol: float = 1e-9
) -> PredictorData:
    """
    LQ-factor the data and compute Y_hat_F = Y_F Pi along two independent paths.

    Args:
        h: The Hankel set.
        require_full_rank: Passed to :func:`lq_decompose`.
        consistency_rtol: Admissible Frobenius gap between the LQ identity
            L31 Q1 + L32 Q2 and the SVD projection, relative to ||Y_F||.

    Returns:
        The PredictorData.
    """
    lq = lq_decompose(h, require_full_rank=require_full_rank)
    y_hat_lq = lq.l31 @ lq.q1 + lq.l32 @ lq.q2
    y_hat_proj = project_rows(h.y_future, h.past_and_inputs())

    gap = float(np.linalg.norm(y_hat_lq - y_hat_proj))
    scale = float(np.linalg.norm(h.y_future))
    if gap > consistency_rtol * max(scale, np.finfo(float).tiny):
        raise NumericalConsistencyError(
            f"Projection and LQ predictors differ by {gap:.3e} (||Y_F|| = {scale:.3e})",
            {"gap": gap, "y_future_norm": scale},
        )
    logger.debug("Predictor built: N=%d, projection gap %.2e", h.n_cols, gap)
    return PredictorData(hankel=h, lq=lq, y_hat_f=y_hat_lq)


def _lower_solve(
    block: NDArray[np.float64], rhs: NDArray[np.float64], name: str, strict: bool
) -> NDArray[np.float64]:
    diag = np.abs(np.diag(block))
    if diag.size == 0:
        return np.zeros(0)
    if diag.min() > RANK_RTOL * diag.max():
        return la.solve_triangular(block, rhs, lower=True)
    if strict:
        raise RankDeficiencyError(
            f"{name} is singular", rank=numerical_rank(block), expected=block.shape[0]
        )
    return min_norm_solve(block, rhs)


def solve_gamma1(pd: PredictorData, init: InitialCondition) -> NDArray[np.float64]:
    """gamma1 = L11^-1 z_init (minimum-norm when the predictor was built from exact data)."""
    return _lower_solve(pd.lq.l11, pd.z_vector(init), "L11", strict=pd.lq.full_rank)


def gamma2_for_input(
    pd: PredictorData, gamma1: ArrayLike, u_f: ArrayLike
) -> NDArray[np.float64]:
    """gamma2 with L21 gamma1 + L22 gamma2 = u_f."""
    g1 = _vector(gamma1, pd.past_rows, "gamma1")
    u = _vector(u_f, pd.m_inputs * pd.horizon_T, "u_f")
    return _lower_solve(pd.lq.l22, u - pd.lq.l21 @ g1, "L22", strict=pd.lq.full_rank)


def predict_output(
    pd: PredictorData, gamma1: ArrayLike, gamma2: ArrayLike
) -> NDArray[np.float64]:
    """y_f = L31 gamma1 + L32 gamma2."""
    g1 = _vector(gamma1, pd.past_rows, "gamma1")
    g2 = _vector(gamma2, pd.m_inputs * pd.horizon_T, "gamma2")
    return pd.lq.l31 @ g1 + pd.lq.l32 @ g2


def decompose_alpha(
    pd: PredictorData, init: InitialCondition, u_f: ArrayLike
) -> GammaSolution:
    """Gamma coordinates of (z_init, u_f) and alpha* = Q1' gamma1 + Q2' gamma2."""
    gamma1 = solve_gamma1(pd, init)
    gamma2 = gamma2_for_input(pd, gamma1, u_f)
    alpha = pd.lq.q1.T @ gamma1 + pd.lq.q2.T @ gamma2
    return GammaSolution(gamma1=gamma1, gamma2=gamma2, alpha_star=alpha)
