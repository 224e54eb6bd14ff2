"""CLI commands for cache management."""

from __future__ import annotations

import click

from ddpc_cli.commands.common import FORMAT_OPTION, emit
from ddpc_cli.harness.cache import ResultCache


@click.group()
def cache() -> None:
    """Manage the run result cache."""
    pass


@cache.command("clear")
@FORMAT_OPTION
@click.pass_context
def clear_cache(ctx: click.Context, local_format: str | None) -> None:
    """Remove every cached run."""
    settings = ctx.obj["settings"]
    cache_instance = ResultCache(cache_dir=settings.cache_dir, enabled=True)

    try:
        count = cache_instance.invalidate()
        emit(ctx, {"cleared": count, "cache_dir": str(settings.cache_dir)}, local_format)
    finally:
        cache_instance.close()


@cache.command("info")
@FORMAT_OPTION
@click.pass_context
def cache_info(ctx: click.Context, local_format: str | None) -> None:
    """Show cache information."""
    settings = ctx.obj["settings"]
    cache_instance = ResultCache(cache_dir=settings.cache_dir, enabled=True)

    try:
        result = {
            "cache_dir": str(settings.cache_dir),
            "entries": len(cache_instance),
            "enabled": settings.use_cache,
        }
        emit(ctx, result, local_format)
    finally:
        cache_instance.close()
