"""CLI command that writes a training batch."""

from __future__ import annotations

from pathlib import Path

import click

from ddpc_cli.commands.common import CONFIG_OPTION, FORMAT_OPTION, emit, load_experiment
from ddpc_cli.harness.experiment import derive_seed, training_batch
from ddpc_cli.plant.simulation import measure_snr


@click.command()
@CONFIG_OPTION
@click.option("--run-index", type=click.IntRange(min=0), default=0, show_default=True,
              help="Monte-Carlo index whose plant and data are generated")
@click.option("--n-data", type=click.IntRange(min=1), help="Batch length (overrides n_data)")
@click.option("--out", "-o", "out_path", type=click.Path(path_type=Path, dir_okay=False),
              default=Path("batch.csv"), show_default=True, help="CSV file to write")
@FORMAT_OPTION
@click.pass_context
def generate(
    ctx: click.Context,
    config_path: Path | None,
    run_index: int,
    n_data: int | None,
    out_path: Path,
    local_format: str | None,
) -> None:
    """Simulate the open-loop training batch of one run and write it as CSV.

    Columns are t, u_*, y_* and the innovations e_*.

    \b
    Examples:
        ddpc generate --out data/batch.csv
        ddpc generate --config bench.toml --run-index 3 --n-data 2000
    """
    cfg = load_experiment(config_path)
    if n_data is not None:
        cfg = cfg.with_value("n_data", n_data)
    system, std, batch = training_batch(cfg, run_index)
    batch.to_csv(out_path)
    emit(
        ctx,
        {
            "file": str(out_path),
            "samples": batch.length,
            "run_seed": derive_seed(cfg.seed, run_index, "system"),
            "innovation_std": std,
            "snr_db": measure_snr(batch, system, [0.0] * system.n_states),
            "k_gain": system.k.reshape(-1),
            "observer_spectral_radius": system.lambda_max,
        },
        local_format,
    )
