"""Output formatting utilities."""

from __future__ import annotations

import json
import math
from datetime import datetime, timezone
from typing import Any

import numpy as np

from ddpc_cli.config import OutputFormat


def _plain(value: Any) -> Any:
    """JSON-safe copy: numpy scalars and arrays unwrapped, non-finite floats as null."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return _plain(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def format_output(
    data: Any,
    output_format: OutputFormat = "json",
) -> str:
    """
    Format command results for output.

    Args:
        data: Result data to format.
        output_format: Output format type.

    Returns:
        Formatted string output.
    """
    output: dict[str, Any] = {
        "success": True,
        "data": _plain(data),
        "metadata": {
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
    }
    return _format_json(output, output_format)


def format_error(
    error: Exception,
    output_format: OutputFormat = "json",
) -> str:
    """
    Format an error for output.

    Args:
        error: The exception to format.
        output_format: Output format type.

    Returns:
        Formatted error string.
    """
    from ddpc_cli.exceptions import DDPCError

    if isinstance(error, DDPCError):
        output = error.to_dict()
    else:
        output = {
            "error": True,
            "code": "unexpected_error",
            "message": str(error),
        }

    return _format_json(_plain(output), output_format)


def _format_json(data: dict[str, Any], output_format: OutputFormat) -> str:
    """Format a dictionary as JSON string."""
    if output_format == "pretty":
        return json.dumps(data, indent=2, ensure_ascii=False)
    return json.dumps(data, separators=(",", ":"), ensure_ascii=False)
