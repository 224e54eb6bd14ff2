"""Custom exceptions for ddpc-cli."""

from __future__ import annotations

from pathlib import Path
from typing import Any


class DDPCError(Exception):
    """Base exception for all toolkit errors."""

    exit_code: int = 1
    code: str = "error"

    def __init__(self, message: str, details: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> dict[str, Any]:
        """Convert exception to dictionary for JSON output."""
        result: dict[str, Any] = {
            "error": True,
            "code": self.code,
            "message": self.message,
        }
        if self.details:
            result["details"] = self.details
        return result


class ShapeError(DDPCError):
    """Array dimensions do not agree."""

    exit_code = 2
    code = "shape_error"


class IndexOutOfRangeError(DDPCError):
    """A window reaches past the end of a signal."""

    exit_code = 3
    code = "index_out_of_range"

    def __init__(self, message: str, index: int, length: int) -> None:
        super().__init__(message, {"index": index, "length": length})
        self.index = index
        self.length = length


class InsufficientDataError(DDPCError):
    """Not enough samples for the requested horizons."""

    exit_code = 4
    code = "insufficient_data"

    def __init__(self, message: str, required: int, available: int) -> None:
        super().__init__(message, {"required": required, "available": available})
        self.required = required
        self.available = available


class RankDeficiencyError(DDPCError):
    """Data matrix is numerically rank deficient."""

    exit_code = 5
    code = "rank_deficient"

    def __init__(self, message: str, rank: int, expected: int) -> None:
        super().__init__(message, {"rank": rank, "expected": expected})
        self.rank = rank
        self.expected = expected


class ResidualTooLargeError(DDPCError):
    """Linear system is inconsistent beyond tolerance."""

    exit_code = 6
    code = "residual_too_large"

    def __init__(self, message: str, residual: float) -> None:
        super().__init__(message, {"residual": residual})
        self.residual = residual


class NumericalConsistencyError(DDPCError):
    """Two computations of the same quantity disagree."""

    exit_code = 7
    code = "numerical_inconsistency"


class SystemValidationError(DDPCError):
    """Plant matrices violate minimality or observer stability."""

    exit_code = 8
    code = "invalid_system"


class SolverError(DDPCError):
    """QP solve ended without an optimal status."""

    exit_code = 9
    code = "solver_failure"

    def __init__(self, message: str, status: str, iterations: int = 0) -> None:
        super().__init__(message, {"status": status, "iterations": iterations})
        self.status = status
        self.iterations = iterations


class ConfigError(DDPCError):
    """Malformed experiment configuration."""

    exit_code = 10
    code = "config_error"

    def __init__(self, message: str, key: str | None = None) -> None:
        super().__init__(message, {"key": key} if key else None)
        self.key = key


class DataFileError(DDPCError):
    """A data or config file is missing or unreadable."""

    exit_code = 11
    code = "data_file_error"

    def __init__(self, message: str, path: Path | str) -> None:
        super().__init__(message, {"path": str(path)})
        self.path = Path(path)
