"""CLI command comparing schemes on shared runs."""

from __future__ import annotations

from pathlib import Path

import click

from ddpc_cli.commands.common import CONFIG_OPTION, FORMAT_OPTION, OUT_OPTION, emit, open_cache
from ddpc_cli.exceptions import ConfigError
from ddpc_cli.harness.results import write_runs, write_summary
from ddpc_cli.harness.sweep import compare as compare_schemes
from ddpc_cli.models.config import SCHEME_KINDS, ExperimentConfig, load_config

DEFAULT_SCHEMES = "spc,spc_slack,berberich,elastic_net,gamma_ddpc"


@click.command()
@CONFIG_OPTION
@click.option("--schemes", default=DEFAULT_SCHEMES, show_default=True,
              help="Comma-separated scheme kinds")
@OUT_OPTION
@FORMAT_OPTION
@click.pass_context
def compare(
    ctx: click.Context,
    config_path: Path | None,
    schemes: str,
    out_dir: Path,
    local_format: str | None,
) -> None:
    """Run several schemes on the same plants and disturbances against one oracle baseline.

    Penalties are read from [schemes.<kind>] tables, falling back to [scheme].
    Writes compare.csv (one row per scheme) and compare_runs.csv (every run).

    \b
    Examples:
        ddpc compare --schemes spc,spc_slack,berberich,gamma_ddpc
        ddpc compare --config tuned.toml --out results/
    """
    settings = ctx.obj["settings"]
    kinds = [k.strip() for k in schemes.split(",") if k.strip()]
    unknown = [k for k in kinds if k not in SCHEME_KINDS]
    if unknown:
        raise ConfigError(f"Unknown schemes: {', '.join(unknown)}", key="schemes")
    cfg = load_config(config_path) if config_path is not None else ExperimentConfig()

    cache = open_cache(settings)
    try:
        aggregates, runs = compare_schemes(cfg, kinds, settings, cache)
    finally:
        cache.close()

    all_runs = [r for results in runs.values() for r in results]
    files = [
        write_summary(aggregates, out_dir / "compare.csv"),
        write_runs(all_runs, out_dir / "compare_runs.csv"),
    ]
    emit(
        ctx,
        {"files": [str(f) for f in files], "schemes": [a.as_record() for a in aggregates]},
        local_format,
    )
