"""Output formatting for command results and errors."""

from ddpc_cli.output.errors import handle_error
from ddpc_cli.output.formatters import format_error, format_output

__all__ = ["format_error", "format_output", "handle_error"]
