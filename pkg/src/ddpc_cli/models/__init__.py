"""Pydantic models for experiment configuration."""

from ddpc_cli.models.config import (
    SCHEME_KINDS,
    SCHEME_PENALTIES,
    ExperimentConfig,
    SchemeConfig,
    SchemeKind,
    SweepSpec,
    load_config,
    parse_grid,
    validate_config,
)

__all__ = [
    "SCHEME_KINDS",
    "SCHEME_PENALTIES",
    "ExperimentConfig",
    "SchemeConfig",
    "SchemeKind",
    "SweepSpec",
    "load_config",
    "parse_grid",
    "validate_config",
]
