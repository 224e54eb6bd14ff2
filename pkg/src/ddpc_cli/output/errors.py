"""Error output formatting."""

from __future__ import annotations

import sys
from typing import NoReturn

import click

from ddpc_cli.config import OutputFormat
from ddpc_cli.exceptions import DDPCError
from ddpc_cli.output.formatters import format_error


def handle_error(
    error: Exception,
    output_format: OutputFormat = "json",
) -> NoReturn:
    """
    Print the error envelope on stderr and exit with the error's exit code.

    Args:
        error: The exception to handle.
        output_format: Output format type.
    """
    click.echo(format_error(error, output_format), err=True)

    if isinstance(error, DDPCError):
        sys.exit(error.exit_code)
    sys.exit(1)
