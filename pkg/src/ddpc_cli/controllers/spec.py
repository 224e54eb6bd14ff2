"""Receding-horizon problem data shared by every scheme."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ddpc_cli.exceptions import ConfigError, ShapeError


def _weight(value: ArrayLike | None, size: int, default: float, key: str) -> NDArray[np.float64]:
    if value is None:
        return default * np.eye(size)
    w = np.asarray(value, dtype=float)
    if w.ndim == 0:
        return float(w) * np.eye(size)
    if w.ndim == 1:
        w = np.diag(w)
    if w.shape != (size, size):
        raise ShapeError(f"{key} has shape {w.shape}, expected {(size, size)}")
    return w


def _per_channel(
    value: ArrayLike | None, size: int, default: float, key: str
) -> NDArray[np.float64]:
    if value is None:
        return np.full(size, default)
    v = np.asarray(value, dtype=float)
    if v.ndim == 0:
        return np.full(size, float(v))
    v = v.reshape(-1)
    if v.shape[0] != size:
        raise ShapeError(f"{key} has {v.shape[0]} entries, expected {size}")
    return v


@dataclass(frozen=True)
class ControlSpec:
    """
    Horizons, weights, references and box constraints of the stage cost
    ||y(k) - y_r||_Q^2 + ||u(k) - u_r||_R^2 summed over the prediction horizon.
    """

    horizon_T: int
    rho: int
    q_weight: NDArray[np.float64]
    r_weight: NDArray[np.float64]
    y_ref: NDArray[np.float64]
    u_ref: NDArray[np.float64]
    u_min: NDArray[np.float64]
    u_max: NDArray[np.float64]
    y_min: NDArray[np.float64]
    y_max: NDArray[np.float64]
    terminal_constraint: bool = False

    def __post_init__(self) -> None:
        if self.horizon_T < 1 or self.rho < 1:
            raise ConfigError(
                f"Horizons must be positive, got T={self.horizon_T}, rho={self.rho}",
                key="horizon_T",
            )
        if self.terminal_constraint and self.rho > self.horizon_T:
            raise ConfigError(
                f"Terminal constraint spans rho={self.rho} steps but T={self.horizon_T}",
                key="terminal_constraint",
            )
        if np.linalg.eigvalsh(self.q_weight).min() < -1e-12 * max(1.0, np.abs(self.q_weight).max()):
            raise ConfigError("Q must be positive semidefinite", key="q_weight")
        if np.linalg.eigvalsh(self.r_weight).min() <= 0.0:
            raise ConfigError("R must be positive definite", key="r_weight")
        if np.any(self.u_min > self.u_max) or np.any(self.y_min > self.y_max):
            raise ConfigError("Box constraint with min > max", key="u_min")

    @classmethod
    def create(
        cls,
        horizon_T: int,
        rho: int,
        m_inputs: int = 1,
        p_outputs: int = 1,
        q_weight: ArrayLike | None = None,
        r_weight: ArrayLike | None = None,
        y_ref: ArrayLike | None = None,
        u_ref: ArrayLike | None = None,
        u_min: ArrayLike | None = None,
        u_max: ArrayLike | None = None,
        y_min: ArrayLike | None = None,
        y_max: ArrayLike | None = None,
        terminal_constraint: bool = False,
    ) -> ControlSpec:
        """Scalars broadcast per channel; omitted bounds are infinite, Q = I, R = 1e-3 I."""
        return cls(
            horizon_T=horizon_T,
            rho=rho,
            q_weight=_weight(q_weight, p_outputs, 1.0, "q_weight"),
            r_weight=_weight(r_weight, m_inputs, 1e-3, "r_weight"),
            y_ref=_per_channel(y_ref, p_outputs, 0.0, "y_ref"),
            u_ref=_per_channel(u_ref, m_inputs, 0.0, "u_ref"),
            u_min=_per_channel(u_min, m_inputs, -np.inf, "u_min"),
            u_max=_per_channel(u_max, m_inputs, np.inf, "u_max"),
            y_min=_per_channel(y_min, p_outputs, -np.inf, "y_min"),
            y_max=_per_channel(y_max, p_outputs, np.inf, "y_max"),
            terminal_constraint=terminal_constraint,
        )

    @property
    def m_inputs(self) -> int:
        return int(self.r_weight.shape[0])

    @property
    def p_outputs(self) -> int:
        return int(self.q_weight.shape[0])

    @property
    def q_bar(self) -> NDArray[np.float64]:
        return np.kron(np.eye(self.horizon_T), self.q_weight)

    @property
    def r_bar(self) -> NDArray[np.float64]:
        return np.kron(np.eye(self.horizon_T), self.r_weight)

    def stacked(self, values: NDArray[np.float64]) -> NDArray[np.float64]:
        """Repeat a per-step vector over the horizon."""
        return np.tile(values, self.horizon_T)

    def stage_cost(self, u: NDArray[np.float64], y: NDArray[np.float64]) -> float:
        du, dy = u - self.u_ref, y - self.y_ref
        return float(dy @ self.q_weight @ dy + du @ self.r_weight @ du)


@dataclass(frozen=True)
class ControlStep:
    """Outcome of one receding-horizon solve; ``u_first`` is applied to the plant."""

    u_first: NDArray[np.float64]
    u_plan: NDArray[np.float64]
    y_plan: NDArray[np.float64]
    solver_stats: dict[str, Any] = field(default_factory=dict)
    decision_extras: dict[str, Any] = field(default_factory=dict)
