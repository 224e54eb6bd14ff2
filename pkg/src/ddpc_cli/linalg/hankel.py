"""Block-Hankel data matrices for data-driven predictors.

Every Hankel matrix here is scaled by 1/sqrt(N), N being its column count, so that
products such as ``Z_P @ Z_P.T`` are sample covariances.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import ArrayLike, NDArray

from ddpc_cli.exceptions import IndexOutOfRangeError, InsufficientDataError, ShapeError

if TYPE_CHECKING:
    from ddpc_cli.plant.batch import TrajectoryBatch

logger = logging.getLogger(__name__)


def as_samples(signal: ArrayLike) -> NDArray[np.float64]:
    """Return ``signal`` as a (length, dim) float array; 1-D input is one channel."""
    data = np.asarray(signal, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    if data.ndim != 2:
        raise ShapeError(f"Expected a 1-D or 2-D signal, got {data.ndim} dimensions")
    return data


def build_hankel(signal: ArrayLike, t0: int, t1: int, n_cols: int) -> NDArray[np.float64]:
    """
    Build the scaled block-Hankel matrix of a signal window.

    Block-row ``i`` (``0 <= i <= t1 - t0``) of column ``j`` holds sample ``t0 + i + j``.

    Args:
        signal: Samples, shape (length,) or (length, s).
        t0: First time index of the window.
        t1: Last time index of the window (inclusive).
        n_cols: Number of columns N.

    Returns:
        Matrix of shape (s * (t1 - t0 + 1), n_cols) divided by sqrt(n_cols).
    """
    data = as_samples(signal)
    if n_cols < 1:
        raise ShapeError(f"n_cols must be positive, got {n_cols}")
    if t0 < 0 or t1 < t0:
        raise ShapeError(f"Invalid window [{t0}, {t1}]")

    last = t1 + n_cols - 1
    if last >= data.shape[0]:
        raise IndexOutOfRangeError(
            f"Sample {last} is required but the signal only has {data.shape[0]} samples",
            index=last,
            length=data.shape[0],
        )

    depth = t1 - t0 + 1
    # windows[j, k, i] = data[t0 + i + j, k]
    windows = sliding_window_view(data[t0 : last + 1], depth, axis=0)
    matrix = windows.transpose(2, 1, 0).reshape(depth * data.shape[1], n_cols)
    return matrix / np.sqrt(n_cols)


@dataclass(frozen=True)
class HankelSet:
    """Past/future data matrices shared by every predictor."""

    z_past: NDArray[np.float64]
    u_future: NDArray[np.float64]
    y_future: NDArray[np.float64]
    rho: int
    horizon_T: int
    n_cols: int
    m_inputs: int
    p_outputs: int

    @property
    def past_rows(self) -> int:
        return (self.m_inputs + self.p_outputs) * self.rho

    def past_and_inputs(self) -> NDArray[np.float64]:
        """The regressor matrix [Z_P; U_F]."""
        return np.vstack((self.z_past, self.u_future))

    def stacked(self) -> NDArray[np.float64]:
        """The joint matrix [Z_P; U_F; Y_F]."""
        return np.vstack((self.z_past, self.u_future, self.y_future))


def build_hankel_set(batch: TrajectoryBatch, rho: int, horizon_T: int) -> HankelSet:
    """
    Build Z_P, U_F and Y_F from one open-loop batch.

    Column j of Z_P stacks z(k) = [u(k); y(k)] for k in [j, j + rho - 1]; column j of U_F
    and Y_F covers [j + rho, j + rho + T - 1]. All N = N_data - T - rho columns are used.

    Args:
        batch: Training trajectory.
        rho: Past horizon.
        horizon_T: Prediction horizon T.

    Returns:
        The HankelSet.
    """
    if rho < 1 or horizon_T < 1:
        raise ShapeError(f"rho and T must be positive, got rho={rho}, T={horizon_T}")

    n_data = batch.length
    n_cols = n_data - horizon_T - rho
    if n_cols < 1:
        raise InsufficientDataError(
            f"Need at least {horizon_T + rho + 1} samples for rho={rho}, T={horizon_T}, "
            f"got {n_data}",
            required=horizon_T + rho + 1,
            available=n_data,
        )

    m, p = batch.m_inputs, batch.p_outputs
    if n_cols <= (m + p) * (rho + horizon_T):
        logger.warning(
            "N=%d columns cannot be persistently exciting for (m+p)(rho+T)=%d rows",
            n_cols,
            (m + p) * (rho + horizon_T),
        )

    z = np.hstack((batch.u, batch.y))
    return HankelSet(
        z_past=build_hankel(z, 0, rho - 1, n_cols),
        u_future=build_hankel(batch.u, rho, rho + horizon_T - 1, n_cols),
        y_future=build_hankel(batch.y, rho, rho + horizon_T - 1, n_cols),
        rho=rho,
        horizon_T=horizon_T,
        n_cols=n_cols,
        m_inputs=m,
        p_outputs=p,
    )
