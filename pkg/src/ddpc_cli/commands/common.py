"""Options and helpers shared by the commands."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import click

from ddpc_cli.config import OutputFormat, Settings
from ddpc_cli.harness.cache import ResultCache
from ddpc_cli.models.config import SCHEME_KINDS, ExperimentConfig, load_config
from ddpc_cli.output.formatters import format_output

# Shared format option for commands
FORMAT_OPTION = click.option(
    "--format", "-f", "local_format",
    type=click.Choice(["json", "pretty", "compact"]),
    help="Output format (overrides global --format)",
)

CONFIG_OPTION = click.option(
    "--config", "-c", "config_path",
    type=click.Path(path_type=Path, dir_okay=False),
    help="Experiment TOML file (benchmark defaults when omitted)",
)

SCHEME_OPTION = click.option(
    "--scheme", "-s",
    type=click.Choice(SCHEME_KINDS),
    help="Scheme to run (overrides [scheme].kind)",
)

OUT_OPTION = click.option(
    "--out", "-o", "out_dir",
    type=click.Path(path_type=Path, file_okay=False),
    default=Path("results"),
    show_default=True,
    help="Directory the CSV files are written to",
)


def load_experiment(config_path: Path | None, scheme: str | None = None) -> ExperimentConfig:
    cfg = load_config(config_path) if config_path is not None else ExperimentConfig()
    if scheme is not None:
        cfg = cfg.with_scheme(cfg.scheme_for(scheme))
    return cfg


def open_cache(settings: Settings) -> ResultCache:
    return ResultCache(cache_dir=settings.cache_dir, enabled=settings.use_cache)


def emit(ctx: click.Context, data: Any, local_format: str | None) -> None:
    settings: Settings = ctx.obj["settings"]
    output_format: OutputFormat = local_format or settings.output_format  # type: ignore[assignment]
    click.echo(format_output(data, output_format))
