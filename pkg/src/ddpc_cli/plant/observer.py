"""Steady-state state estimator built from the true innovation-form matrices."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ddpc_cli.plant.system import LinearSystem, as_state


class InnovationObserver:
    """
    One-step-ahead predictor x_hat(t+1) = A x_hat + B u + K (y - C x_hat - D u).

    With the true K this is the steady-state Kalman predictor of the plant; its error
    dynamics are governed by A - KC.
    """

    def __init__(self, system: LinearSystem, x0: ArrayLike | None = None):
        self.system = system
        self.state = (
            np.zeros(system.n_states) if x0 is None else as_state(x0, system).copy()
        )

    def innovation(self, u: NDArray[np.float64], y: NDArray[np.float64]) -> NDArray[np.float64]:
        return y - self.system.c @ self.state - self.system.d @ u

    def update(self, u: ArrayLike, y: ArrayLike) -> NDArray[np.float64]:
        """Consume the sample (u(t), y(t)) and return x_hat(t+1)."""
        u_t = np.asarray(u, dtype=float).reshape(-1)
        y_t = np.asarray(y, dtype=float).reshape(-1)
        e = self.innovation(u_t, y_t)
        sys = self.system
        self.state = sys.a @ self.state + sys.b @ u_t + sys.k @ e
        return self.state
