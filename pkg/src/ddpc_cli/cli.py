"""Main CLI entry point for ddpc-cli."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import click

from ddpc_cli import __version__
from ddpc_cli.commands.cache import cache
from ddpc_cli.commands.compare import compare
from ddpc_cli.commands.generate import generate
from ddpc_cli.commands.run import run
from ddpc_cli.commands.select_rho import select_rho
from ddpc_cli.commands.sweep import sweep
from ddpc_cli.config import OutputFormat, Settings, get_settings, set_settings
from ddpc_cli.output.errors import handle_error


@click.group()
@click.option(
    "--format", "-f", "output_format",
    type=click.Choice(["json", "pretty", "compact"]),
    default="json",
    help="Output format",
)
@click.option(
    "--no-cache",
    is_flag=True,
    help="Do not read or write cached runs",
)
@click.option(
    "--cache-dir",
    type=click.Path(path_type=Path, file_okay=False),
    help="Cache directory (default: ~/.cache/ddpc-cli)",
)
@click.option(
    "--workers", "-w",
    type=click.IntRange(min=1),
    help="Processes for Monte-Carlo runs (default: 1)",
)
@click.option(
    "--debug",
    is_flag=True,
    help="Enable debug logging",
)
@click.version_option(version=__version__, prog_name="ddpc")
@click.pass_context
def main(
    ctx: click.Context,
    output_format: OutputFormat,
    no_cache: bool,
    cache_dir: Path | None,
    workers: int | None,
    debug: bool,
) -> None:
    """ddpc - regularized data-driven predictive control benchmark.

    Simulates the benchmark plant, builds data-driven predictors and runs closed-loop
    Monte-Carlo experiments for every scheme, writing CSV results.

    \b
    Examples:
        ddpc generate --out data/batch.csv
        ddpc run --config bench.toml --scheme gamma_ddpc --out results/
        ddpc sweep --scheme gamma_ddpc_beta --param beta --grid 1e-4:10:1e4
        ddpc compare --schemes spc,spc_slack,berberich,gamma_ddpc

    \b
    Environment Variables:
        DDPC_CACHE_DIR - Cache directory
        DDPC_WORKERS   - Default number of worker processes
    """
    # Configure logging
    if debug:
        logging.basicConfig(
            level=logging.DEBUG,
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        )

    # Build settings; environment first, flags on top
    overrides: dict[str, Any] = {"output_format": output_format}
    if no_cache:
        overrides["use_cache"] = False
    if cache_dir:
        overrides["cache_dir"] = cache_dir
    if workers is not None:
        overrides["workers"] = workers
    if debug:
        overrides["debug"] = True
    settings = Settings(**overrides)

    # Store in context
    ctx.ensure_object(dict)
    ctx.obj["settings"] = settings
    set_settings(settings)


# Register commands
main.add_command(generate)
main.add_command(select_rho)
main.add_command(run)
main.add_command(sweep)
main.add_command(compare)
main.add_command(cache)


def cli() -> None:
    """CLI entry point with error handling."""
    try:
        main(obj={}, standalone_mode=False)
    except click.exceptions.Abort:
        raise SystemExit(1) from None
    except click.ClickException as e:
        e.show()
        raise SystemExit(e.exit_code) from None
    except Exception as e:
        handle_error(e, get_settings().output_format)


if __name__ == "__main__":
    cli()
