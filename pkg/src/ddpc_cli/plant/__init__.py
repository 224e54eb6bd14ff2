"""Innovation-form plant, training data and the closed-loop environment."""

from ddpc_cli.plant.batch import TrajectoryBatch
from ddpc_cli.plant.observer import InnovationObserver
from ddpc_cli.plant.simulation import (
    ExcitationSpec,
    NoiseSpec,
    calibrate_innovation_std,
    deterministic_response,
    measure_snr,
    simulate,
    uniform_input,
)
from ddpc_cli.plant.system import LinearSystem, benchmark_system, observer_decay

__all__ = [
    "ExcitationSpec",
    "InnovationObserver",
    "LinearSystem",
    "NoiseSpec",
    "TrajectoryBatch",
    "benchmark_system",
    "calibrate_innovation_std",
    "deterministic_response",
    "measure_snr",
    "observer_decay",
    "simulate",
    "uniform_input",
]
