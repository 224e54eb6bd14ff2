"""CLI command that scores past horizons with the FPE criterion."""

from __future__ import annotations

from pathlib import Path

import click

from ddpc_cli.commands.common import CONFIG_OPTION, FORMAT_OPTION, emit, load_experiment
from ddpc_cli.harness.experiment import training_batch
from ddpc_cli.harness.results import write_fpe
from ddpc_cli.plant.batch import TrajectoryBatch
from ddpc_cli.plant.system import LinearSystem
from ddpc_cli.predictor.horizon import select_rho as search_rho


@click.command("select-rho")
@CONFIG_OPTION
@click.option("--data", "data_path", type=click.Path(path_type=Path, dir_okay=False),
              help="Trajectory CSV to score instead of a simulated batch")
@click.option("--run-index", type=click.IntRange(min=0), default=0, show_default=True,
              help="Monte-Carlo index of the simulated batch")
@click.option("--rho-min", type=click.IntRange(min=1),
              help="Smallest candidate (overrides rho_min)")
@click.option("--rho-max", type=click.IntRange(min=1), help="Largest candidate (overrides rho_max)")
@click.option("--out", "-o", "out_path", type=click.Path(path_type=Path, dir_okay=False),
              default=Path("fpe.csv"), show_default=True, help="CSV file to write")
@FORMAT_OPTION
@click.pass_context
def select_rho(
    ctx: click.Context,
    config_path: Path | None,
    data_path: Path | None,
    run_index: int,
    rho_min: int | None,
    rho_max: int | None,
    out_path: Path,
    local_format: str | None,
) -> None:
    """Pick the past horizon rho minimizing the FPE of an ARX fit.

    Writes one row per candidate (rho, fpe, and decay = ||(A - KC)^rho|| when the plant
    is known).

    \b
    Examples:
        ddpc select-rho --rho-min 2 --rho-max 40
        ddpc select-rho --data data/batch.csv --out fpe.csv
    """
    cfg = load_experiment(config_path)
    system: LinearSystem | None = None
    if data_path is not None:
        batch = TrajectoryBatch.read_csv(data_path)
    else:
        system, _, batch = training_batch(cfg, run_index)

    search = search_rho(
        batch,
        rho_min if rho_min is not None else cfg.rho_min,
        rho_max if rho_max is not None else cfg.rho_max,
        system=system,
    )
    write_fpe(search, out_path)
    emit(
        ctx,
        {
            "file": str(out_path),
            "chosen_rho": search.chosen_rho,
            "fpe": search.scores[search.chosen_rho],
            "candidates": len(search.scores),
        },
        local_format,
    )
