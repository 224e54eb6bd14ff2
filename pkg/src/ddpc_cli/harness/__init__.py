"""Monte-Carlo closed-loop experiments, sweeps and their CSV output."""

from ddpc_cli.harness.cache import ResultCache
from ddpc_cli.harness.experiment import (
    ClosedLoopResult,
    derive_rng,
    oracle_baseline,
    prepare_run,
    run_closed_loop,
    run_experiment,
    run_single,
)
from ddpc_cli.harness.sweep import Aggregate, SweepRow, compare, parse_grid, run_sweep

__all__ = [
    "Aggregate",
    "ClosedLoopResult",
    "ResultCache",
    "SweepRow",
    "compare",
    "derive_rng",
    "oracle_baseline",
    "parse_grid",
    "prepare_run",
    "run_closed_loop",
    "run_experiment",
    "run_single",
    "run_sweep",
]
