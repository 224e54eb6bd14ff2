"""Projections, pseudo-inverses and the block LQ factorization of the data matrix."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from numpy.typing import ArrayLike, NDArray

from ddpc_cli.exceptions import (
    InsufficientDataError,
    RankDeficiencyError,
    ResidualTooLargeError,
    ShapeError,
)
from ddpc_cli.linalg.hankel import HankelSet

logger = logging.getLogger(__name__)

# Singular values below RANK_RTOL * sigma_max count as zero everywhere in the toolkit.
RANK_RTOL = 1e-10


def _kept(singular_values: NDArray[np.float64], rtol: float) -> NDArray[np.bool_]:
    if singular_values.size == 0 or singular_values[0] <= 0.0:
        return np.zeros(singular_values.shape, dtype=bool)
    return singular_values > rtol * singular_values[0]


def numerical_rank(matrix: ArrayLike, rtol: float = RANK_RTOL) -> int:
    """Number of singular values above ``rtol`` times the largest one."""
    s = la.svd(np.atleast_2d(np.asarray(matrix, dtype=float)), compute_uv=False)
    return int(np.count_nonzero(_kept(s, rtol)))


def pseudo_inverse(matrix: ArrayLike, rtol: float = RANK_RTOL) -> NDArray[np.float64]:
    """Moore-Penrose pseudo-inverse through the SVD with the shared cutoff."""
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    u, s, vt = la.svd(a, full_matrices=False)
    keep = _kept(s, rtol)
    return (vt[keep].T / s[keep]) @ u[:, keep].T


def row_space_basis(matrix: ArrayLike, rtol: float = RANK_RTOL) -> NDArray[np.float64]:
    """Orthonormal rows spanning the row space of ``matrix``."""
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    _, s, vt = la.svd(a, full_matrices=False)
    return vt[_kept(s, rtol)]


def row_space_split(
    matrix: ArrayLike, rtol: float = RANK_RTOL
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Orthonormal rows spanning the row space of ``matrix`` and rows spanning its complement."""
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    _, s, vt = la.svd(a, full_matrices=True)
    rank = int(np.count_nonzero(_kept(s, rtol)))
    return vt[:rank], vt[rank:]


def project_rows(b: ArrayLike, onto: ArrayLike, rtol: float = RANK_RTOL) -> NDArray[np.float64]:
    """
    Project the rows of ``b`` onto the row space of ``onto``.

    Computes B A^T (A A^T)^+ A, i.e. B A^+ A, through the right singular vectors of A.

    Args:
        b: Matrix whose rows are projected.
        onto: Matrix A spanning the target row space.
        rtol: Relative singular-value cutoff.

    Returns:
        The projected matrix, same shape as ``b``.
    """
    bm = np.atleast_2d(np.asarray(b, dtype=float))
    am = np.atleast_2d(np.asarray(onto, dtype=float))
    if bm.shape[1] != am.shape[1]:
        raise ShapeError(
            f"Column counts differ: {bm.shape[1]} vs {am.shape[1]}",
            {"b": list(bm.shape), "onto": list(am.shape)},
        )
    basis = row_space_basis(am, rtol)
    return (bm @ basis.T) @ basis


def min_norm_solve(
    a: ArrayLike, b: ArrayLike, tol: float = 1e-8, rtol: float = RANK_RTOL
) -> NDArray[np.float64]:
    """
    Minimum-norm solution of a consistent linear system.

    Args:
        a: Coefficient matrix.
        b: Right-hand side.
        tol: Admissible residual relative to max(1, ||b||).
        rtol: Relative singular-value cutoff of the pseudo-inverse.

    Returns:
        alpha = A^+ b.
    """
    am = np.atleast_2d(np.asarray(a, dtype=float))
    bv = np.asarray(b, dtype=float)
    if am.shape[0] != bv.shape[0]:
        raise ShapeError(f"System has {am.shape[0]} rows but rhs has {bv.shape[0]}")

    alpha = pseudo_inverse(am, rtol) @ bv
    residual = float(np.linalg.norm(am @ alpha - bv))
    if residual > tol * max(1.0, float(np.linalg.norm(bv))):
        raise ResidualTooLargeError(
            f"Linear system is inconsistent (residual {residual:.3e})", residual=residual
        )
    return alpha


@dataclass(frozen=True)
class LQFactors:
    """Blocks of [Z_P; U_F; Y_F] = L Q with L block lower triangular and Q orthonormal rows."""

    l11: NDArray[np.float64]
    l21: NDArray[np.float64]
    l22: NDArray[np.float64]
    l31: NDArray[np.float64]
    l32: NDArray[np.float64]
    l33: NDArray[np.float64]
    q1: NDArray[np.float64]
    q2: NDArray[np.float64]
    q3: NDArray[np.float64]
    rank: int

    @property
    def n_rows(self) -> int:
        return self.l11.shape[0] + self.l22.shape[0] + self.l33.shape[0]

    @property
    def full_rank(self) -> bool:
        return self.rank == self.n_rows

    def lower(self) -> NDArray[np.float64]:
        """The assembled lower-triangular factor L."""
        a, b, c = self.l11.shape[0], self.l22.shape[0], self.l33.shape[0]
        return np.block(
            [
                [self.l11, np.zeros((a, b)), np.zeros((a, c))],
                [self.l21, self.l22, np.zeros((b, c))],
                [self.l31, self.l32, self.l33],
            ]
        )

    def orthonormal(self) -> NDArray[np.float64]:
        """The stacked orthonormal factor Q."""
        return np.vstack((self.q1, self.q2, self.q3))

    def reassemble(self) -> NDArray[np.float64]:
        return self.lower() @ self.orthonormal()


def lq_decompose(h: HankelSet, require_full_rank: bool = True) -> LQFactors:
    """
    LQ factorization of [Z_P; U_F; Y_F] through a QR factorization of its transpose.

    The diagonal of L is made nonnegative so the factors are unique for full-rank data.

    Args:
        h: The Hankel set.
        require_full_rank: Raise on numerically rank-deficient data (e.g. noise-free
            outputs). When False the factors are returned and ``rank`` records the
            deficiency.

    Returns:
        The LQFactors.
    """
    stacked = h.stacked()
    n_rows, n_cols = stacked.shape
    if n_cols < n_rows:
        raise InsufficientDataError(
            f"LQ factorization needs N >= {n_rows} columns, got {n_cols}",
            required=n_rows + h.rho + h.horizon_T,
            available=n_cols + h.rho + h.horizon_T,
        )

    q_t, r_t = la.qr(stacked.T, mode="economic")
    signs = np.sign(np.diag(r_t))
    signs[signs == 0.0] = 1.0
    lower = r_t.T * signs[None, :]
    ortho = q_t.T * signs[:, None]

    rank = numerical_rank(r_t)
    if rank < n_rows:
        if require_full_rank:
            raise RankDeficiencyError(
                f"Stacked data matrix has numerical rank {rank} < {n_rows}; "
                "data are deterministic or not persistently exciting",
                rank=rank,
                expected=n_rows,
            )
        logger.info("Data matrix rank %d of %d rows, using pseudo-inverse solves", rank, n_rows)

    a = h.past_rows
    b = a + h.m_inputs * h.horizon_T
    return LQFactors(
        l11=lower[:a, :a],
        l21=lower[a:b, :a],
        l22=lower[a:b, a:b],
        l31=lower[b:, :a],
        l32=lower[b:, a:b],
        l33=lower[b:, b:],
        q1=ortho[:a],
        q2=ortho[a:b],
        q3=ortho[b:],
        rank=rank,
    )
