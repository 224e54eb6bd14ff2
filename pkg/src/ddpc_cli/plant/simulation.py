"""Open-loop simulation, training excitation and SNR bookkeeping."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from numpy.typing import ArrayLike, NDArray

from ddpc_cli.exceptions import ConfigError, ShapeError, SystemValidationError
from ddpc_cli.linalg.hankel import as_samples
from ddpc_cli.plant.batch import TrajectoryBatch
from ddpc_cli.plant.system import LinearSystem, as_state, spectral_radius

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseSpec:
    """Zero-mean Gaussian innovation with a seeded generator."""

    innovation_std: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.innovation_std >= 0.0:
            raise ConfigError(
                f"innovation_std must be nonnegative, got {self.innovation_std}",
                key="innovation_std",
            )

    @property
    def noise_free(self) -> bool:
        return self.innovation_std == 0.0


@dataclass(frozen=True)
class ExcitationSpec:
    """I.i.d. uniform training input on [low, high]."""

    low: float = -5.0
    high: float = 5.0

    def __post_init__(self) -> None:
        if not self.high > self.low:
            raise ConfigError(
                f"Excitation interval [{self.low}, {self.high}] is empty", key="input_amplitude"
            )

    @property
    def variance(self) -> float:
        return (self.high - self.low) ** 2 / 12.0


def uniform_input(
    length: int,
    m_inputs: int,
    rng: np.random.Generator,
    excitation: ExcitationSpec | None = None,
) -> NDArray[np.float64]:
    spec = excitation or ExcitationSpec()
    return rng.uniform(spec.low, spec.high, size=(length, m_inputs))


def draw_innovations(
    length: int, p_outputs: int, noise: NoiseSpec, rng: np.random.Generator | None = None
) -> NDArray[np.float64]:
    if noise.noise_free:
        return np.zeros((length, p_outputs))
    generator = rng if rng is not None else np.random.default_rng(noise.seed)
    return generator.normal(0.0, noise.innovation_std, size=(length, p_outputs))


def _check_inputs(system: LinearSystem, u: ArrayLike) -> NDArray[np.float64]:
    inputs = as_samples(u)
    if inputs.shape[0] < 1:
        raise ShapeError("Input sequence is empty")
    if inputs.shape[1] != system.m_inputs:
        raise ShapeError(
            f"Input has {inputs.shape[1]} channels, plant has {system.m_inputs}",
            {"expected": system.m_inputs, "got": inputs.shape[1]},
        )
    return inputs


def _iterate(
    system: LinearSystem,
    x0: NDArray[np.float64],
    u: NDArray[np.float64],
    e: NDArray[np.float64],
) -> NDArray[np.float64]:
    x = x0.copy()
    y = np.empty((u.shape[0], system.p_outputs))
    for t in range(u.shape[0]):
        x, y[t] = system.step(x, u[t], e[t])
    return y


def simulate(
    system: LinearSystem,
    x0: ArrayLike,
    u: ArrayLike,
    noise: NoiseSpec,
    rng: np.random.Generator | None = None,
) -> TrajectoryBatch:
    """
    Iterate the innovation-form plant from ``x0`` under ``u``.

    Args:
        system: The plant.
        x0: Initial state.
        u: Inputs, shape (length, m) or (length,) for a single input.
        noise: Innovation spec; its seed is used unless ``rng`` is passed.
        rng: Generator to draw the innovations from.

    Returns:
        The batch, innovations included.
    """
    inputs = _check_inputs(system, u)
    e = draw_innovations(inputs.shape[0], system.p_outputs, noise, rng)
    y = _iterate(system, as_state(x0, system), inputs, e)
    return TrajectoryBatch(u=inputs, y=y, e=e)


def deterministic_response(
    system: LinearSystem, x0: ArrayLike, u: ArrayLike
) -> NDArray[np.float64]:
    """Output of the conditional-mean system, shape (length, p)."""
    inputs = _check_inputs(system, u)
    zeros = np.zeros((inputs.shape[0], system.p_outputs))
    return _iterate(system, as_state(x0, system), inputs, zeros)


def measure_snr(batch: TrajectoryBatch, system: LinearSystem, x0: ArrayLike) -> float:
    """10 log10(var(y_d) / var(y - y_d)) in dB, ``inf`` for noise-free batches."""
    if batch.e is None:
        raise ShapeError("SNR needs a batch that carries its innovation sequence")
    y_det = deterministic_response(system, x0, batch.u)
    noise_var = float(np.var(batch.y - y_det, axis=0).sum())
    if noise_var == 0.0:
        return math.inf
    signal_var = float(np.var(y_det, axis=0).sum())
    return 10.0 * math.log10(signal_var / noise_var)


def calibrate_innovation_std(system: LinearSystem, snr_db: float, input_variance: float) -> float:
    """
    Innovation standard deviation giving a stationary SNR of ``snr_db``.

    The deterministic output variance comes from A P_d A' - P_d + B Su B' = 0 and the
    noise-channel variance per unit innovation from A P_e A' - P_e + K K' = 0.

    Args:
        system: Plant with stable A.
        snr_db: Target SNR in dB.
        input_variance: Per-channel variance of the white training input.

    Returns:
        The standard deviation of e.
    """
    if spectral_radius(system.a) >= 1.0:
        raise SystemValidationError("SNR calibration needs a stable A")
    input_cov = input_variance * np.eye(system.m_inputs)
    p_det = la.solve_discrete_lyapunov(system.a, system.b @ input_cov @ system.b.T)
    var_det = float(np.trace(system.c @ p_det @ system.c.T + system.d @ input_cov @ system.d.T))
    p_noise = la.solve_discrete_lyapunov(system.a, system.k @ system.k.T)
    gain = float(np.trace(system.c @ p_noise @ system.c.T)) + system.p_outputs
    std = math.sqrt(var_det / (gain * 10.0 ** (snr_db / 10.0)))
    logger.debug("Innovation std %.4g for %.1f dB", std, snr_db)
    return std
