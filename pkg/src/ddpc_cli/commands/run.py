"""CLI command for one Monte-Carlo experiment."""

from __future__ import annotations

from pathlib import Path

import click

from ddpc_cli.commands.common import (
    CONFIG_OPTION,
    FORMAT_OPTION,
    OUT_OPTION,
    SCHEME_OPTION,
    emit,
    load_experiment,
    open_cache,
)
from ddpc_cli.harness.experiment import oracle_baseline, run_experiment
from ddpc_cli.harness.results import write_runs, write_summary, write_trajectories
from ddpc_cli.harness.sweep import Aggregate


@click.command()
@CONFIG_OPTION
@SCHEME_OPTION
@OUT_OPTION
@click.option("--runs", type=click.IntRange(min=1),
              help="Monte-Carlo runs (overrides n_monte_carlo)")
@click.option("--baseline/--no-baseline", default=False,
              help="Also run the oracle MPC and report |J - J_oracle|")
@FORMAT_OPTION
@click.pass_context
def run(
    ctx: click.Context,
    config_path: Path | None,
    scheme: str | None,
    out_dir: Path,
    runs: int | None,
    baseline: bool,
    local_format: str | None,
) -> None:
    """Run the closed-loop Monte-Carlo experiment of one scheme.

    Writes run_<scheme>.csv (run_id, scheme, J, J_u, status), trajectories_<scheme>.csv
    and summary.csv into the output directory.

    \b
    Examples:
        ddpc run --config bench.toml --scheme gamma_ddpc --out results/
        ddpc --workers 4 run --scheme spc_slack --runs 30 --baseline
    """
    settings = ctx.obj["settings"]
    cfg = load_experiment(config_path, scheme)
    if runs is not None:
        cfg = cfg.model_copy(update={"n_monte_carlo": runs})

    cache = open_cache(settings)
    try:
        results = run_experiment(cfg, settings, cache)
        oracle = oracle_baseline(cfg, settings, cache) if baseline else None
    finally:
        cache.close()

    kind = cfg.scheme.kind
    aggregate = Aggregate.from_results(cfg.scheme.tag, results, oracle)
    files = [
        write_runs(results, out_dir / f"run_{kind}.csv"),
        write_trajectories(results, out_dir / f"trajectories_{kind}.csv"),
        write_summary([aggregate], out_dir / "summary.csv"),
    ]
    emit(
        ctx,
        {"files": [str(f) for f in files], "summary": aggregate.as_record()},
        local_format,
    )
