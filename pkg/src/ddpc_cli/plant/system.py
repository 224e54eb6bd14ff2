"""Innovation-form LTI plants.

    x(t+1) = A x(t) + B u(t) + K e(t)
    y(t)   = C x(t) + D u(t) + e(t)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from tenacity import (
    before_sleep_log,
    retry,
    retry_if_exception_type,
    stop_after_attempt,
)

from ddpc_cli.exceptions import ShapeError, SystemValidationError
from ddpc_cli.linalg.factorization import numerical_rank

logger = logging.getLogger(__name__)

BENCHMARK_A = ((0.7326, -0.0861), (0.1722, 0.9909))
BENCHMARK_B = ((0.0609,), (0.0064,))
BENCHMARK_C = ((0.0, 1.4142),)
BENCHMARK_D = ((0.0,),)


def spectral_radius(matrix: NDArray[np.float64]) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(matrix)))) if matrix.size else 0.0


@dataclass(frozen=True)
class LinearSystem:
    """Minimal innovation-form plant with strictly stable predictor dynamics A - KC."""

    a: NDArray[np.float64]
    b: NDArray[np.float64]
    c: NDArray[np.float64]
    d: NDArray[np.float64]
    k: NDArray[np.float64]

    def __post_init__(self) -> None:
        a, b, c, d, k = (np.atleast_2d(np.asarray(m, dtype=float)) for m in self.matrices())
        n = a.shape[0]
        m, p = b.shape[1], c.shape[0]
        expected = {"a": (n, n), "b": (n, m), "c": (p, n), "d": (p, m), "k": (n, p)}
        for name, matrix in zip("abcdk", (a, b, c, d, k), strict=True):
            if matrix.shape != expected[name]:
                raise ShapeError(
                    f"Matrix {name.upper()} has shape {matrix.shape}, expected {expected[name]}"
                )
        for name, matrix in zip("abcdk", (a, b, c, d, k), strict=True):
            object.__setattr__(self, name, matrix)

        if numerical_rank(self.controllability_matrix()) < n:
            raise SystemValidationError("(A, B) is not reachable", {"n_states": n})
        if numerical_rank(self.observability_matrix(n)) < n:
            raise SystemValidationError("(A, C) is not observable", {"n_states": n})
        radius = self.lambda_max
        if radius >= 1.0:
            raise SystemValidationError(
                f"A - KC is not strictly stable (spectral radius {radius:.4f})",
                {"spectral_radius": radius},
            )

    def matrices(self) -> tuple[NDArray[np.float64], ...]:
        return (self.a, self.b, self.c, self.d, self.k)

    @property
    def n_states(self) -> int:
        return int(self.a.shape[0])

    @property
    def m_inputs(self) -> int:
        return int(self.b.shape[1])

    @property
    def p_outputs(self) -> int:
        return int(self.c.shape[0])

    @property
    def predictor_matrix(self) -> NDArray[np.float64]:
        """A - KC."""
        return self.a - self.k @ self.c

    @property
    def lambda_max(self) -> float:
        """Spectral radius of A - KC."""
        return spectral_radius(self.predictor_matrix)

    def step(
        self, x: NDArray[np.float64], u: NDArray[np.float64], e: NDArray[np.float64]
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """One sample: returns (x(t+1), y(t))."""
        y = self.c @ x + self.d @ u + e
        return self.a @ x + self.b @ u + self.k @ e, y

    def controllability_matrix(self) -> NDArray[np.float64]:
        blocks = [self.b]
        for _ in range(self.n_states - 1):
            blocks.append(self.a @ blocks[-1])
        return np.hstack(blocks)

    def observability_matrix(self, horizon: int) -> NDArray[np.float64]:
        """Gamma = [C; CA; ...; CA^(horizon-1)]."""
        blocks = [self.c]
        for _ in range(horizon - 1):
            blocks.append(blocks[-1] @ self.a)
        return np.vstack(blocks)

    def markov_parameters(self, horizon: int) -> list[NDArray[np.float64]]:
        """D, CB, CAB, ..., CA^(horizon-2)B."""
        params = [self.d]
        power_b = self.b
        for _ in range(horizon - 1):
            params.append(self.c @ power_b)
            power_b = self.a @ power_b
        return params

    def toeplitz_matrix(self, horizon: int) -> NDArray[np.float64]:
        """Block lower-triangular Toeplitz map from stacked inputs to stacked outputs."""
        p, m = self.p_outputs, self.m_inputs
        params = self.markov_parameters(horizon)
        toeplitz = np.zeros((p * horizon, m * horizon))
        for i in range(horizon):
            for j in range(i + 1):
                toeplitz[i * p : (i + 1) * p, j * m : (j + 1) * m] = params[i - j]
        return toeplitz


def observer_decay(system: LinearSystem, rho: int) -> float:
    """Spectral norm of (A - KC)^rho, the truncation error of a rho-long past window."""
    power = np.linalg.matrix_power(system.predictor_matrix, rho)
    return float(np.linalg.norm(power, 2))


def benchmark_system(seed: int, max_draws: int = 1000) -> LinearSystem:
    """
    Second-order benchmark plant with a random innovation gain.

    K is drawn entrywise from a standard normal and redrawn until A - KC is strictly
    stable, at most ``max_draws`` times.

    Args:
        seed: Seed of the generator K is drawn from.
        max_draws: Number of draws before giving up.

    Returns:
        The benchmark LinearSystem.
    """
    rng = np.random.default_rng(seed)

    @retry(
        stop=stop_after_attempt(max_draws),
        retry=retry_if_exception_type(SystemValidationError),
        before_sleep=before_sleep_log(logger, logging.DEBUG),
        reraise=True,
    )
    def draw() -> LinearSystem:
        return LinearSystem(
            a=np.array(BENCHMARK_A),
            b=np.array(BENCHMARK_B),
            c=np.array(BENCHMARK_C),
            d=np.array(BENCHMARK_D),
            k=rng.standard_normal((2, 1)),
        )

    return draw()


def as_state(x0: ArrayLike, system: LinearSystem) -> NDArray[np.float64]:
    x = np.asarray(x0, dtype=float).reshape(-1)
    if x.shape[0] != system.n_states:
        raise ShapeError(f"Initial state has {x.shape[0]} entries, plant has {system.n_states}")
    return x
