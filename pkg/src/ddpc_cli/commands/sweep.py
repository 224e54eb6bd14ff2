"""CLI command for a parameter sweep."""

from __future__ import annotations

from pathlib import Path
from typing import get_args

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
from ddpc_cli.exceptions import ConfigError
from ddpc_cli.harness.results import write_sweep
from ddpc_cli.harness.sweep import run_sweep
from ddpc_cli.models.config import SweepParam, parse_grid, validate_config

SWEEP_PARAMS = get_args(SweepParam)


@click.command()
@CONFIG_OPTION
@SCHEME_OPTION
@click.option("--param", "-p", "params", type=click.Choice(SWEEP_PARAMS), multiple=True,
              help="Parameter to sweep, repeatable (overrides [sweep].param)")
@click.option("--grid", "-g", "grids", multiple=True,
              help="start:factor:stop or a comma list, one per --param (overrides [sweep].values)")
@OUT_OPTION
@FORMAT_OPTION
@click.pass_context
def sweep(
    ctx: click.Context,
    config_path: Path | None,
    scheme: str | None,
    params: tuple[str, ...],
    grids: tuple[str, ...],
    out_dir: Path,
    local_format: str | None,
) -> None:
    """Sweep one or more parameters over their Cartesian grid and aggregate |J - J_oracle|.

    \b
    Examples:
        ddpc sweep --scheme gamma_ddpc_beta --param beta --grid 1e-4:10:1e4
        ddpc sweep --config bench.toml --param n_data --grid 250,500,1000,2000
        ddpc sweep --scheme elastic_net -p lambda1 -g 1e-8,1e-4 -p lambda2 -g 1e3,1e5
    """
    settings = ctx.obj["settings"]
    cfg = load_experiment(config_path, scheme)
    current = cfg.sweep
    names = list(params) or (list(current.param) if current else [])
    if not names:
        raise ConfigError(
            "No sweep parameter: pass --param or set [sweep].param", key="sweep.param"
        )
    if grids:
        values = [parse_grid(grid) for grid in grids]
    elif current is not None:
        values = [list(grid) for grid in current.values]
    else:
        raise ConfigError("No sweep grid: pass --grid or set [sweep].values", key="sweep.values")
    cfg = validate_config({**cfg.model_dump(), "sweep": {"param": names, "values": values}})

    cache = open_cache(settings)
    try:
        rows = run_sweep(cfg, settings, cache)
    finally:
        cache.close()

    path = write_sweep(rows, out_dir / f"sweep_{'_'.join(names)}.csv")
    emit(
        ctx,
        {"file": str(path), "scheme": cfg.scheme.tag, "rows": [r.as_record() for r in rows]},
        local_format,
    )
