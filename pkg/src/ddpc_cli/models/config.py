"""Validated experiment configuration loaded from TOML files."""

from __future__ import annotations

import itertools
import math
import tomllib
from pathlib import Path
from typing import Any, Literal, get_args

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ddpc_cli.controllers.spec import ControlSpec
from ddpc_cli.exceptions import ConfigError, DataFileError
from ddpc_cli.plant.simulation import ExcitationSpec

SchemeKind = Literal[
    "oracle_mpc",
    "spc",
    "spc_slack",
    "berberich",
    "elastic_net",
    "gamma_ddpc",
    "gamma_ddpc_beta",
    "gamma_three_eta",
]
SCHEME_KINDS: tuple[str, ...] = get_args(SchemeKind)

# Penalties each scheme actually reads
SCHEME_PENALTIES: dict[str, tuple[str, ...]] = {
    "oracle_mpc": (),
    "spc": (),
    "spc_slack": ("lam",),
    "berberich": ("bar_lambda_alpha", "lambda_sigma"),
    "elastic_net": ("lambda1", "lambda2"),
    "gamma_ddpc": (),
    "gamma_ddpc_beta": ("beta",),
    "gamma_three_eta": ("eta",),
}
PENALTY_PARAMS = ("lam", "bar_lambda_alpha", "lambda_sigma", "lambda1", "lambda2", "beta", "eta")
EXPERIMENT_PARAMS = ("rho", "n_data", "snr_target_db", "horizon_T")
INTEGER_PARAMS = ("rho", "n_data", "horizon_T")
SweepParam = Literal[
    "beta",
    "eta",
    "lam",
    "bar_lambda_alpha",
    "lambda_sigma",
    "lambda1",
    "lambda2",
    "rho",
    "n_data",
    "snr_target_db",
    "horizon_T",
]

Weight = float | list[float] | list[list[float]]
PerChannel = float | list[float]


def parse_grid(text: str) -> list[float]:
    """
    Parse a sweep grid.

    ``start:factor:stop`` is a geometric grid (factor > 1, stop included up to roundoff);
    anything else is a comma-separated list of values.

    \b
    Examples:
        parse_grid("1e-4:10:1e4")   # 1e-4, 1e-3, ..., 1e4
        parse_grid("0,0.1,1")
    """
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(part) for part in text.split(":")]
            if len(parts) != 3:
                raise ConfigError(f"Grid '{text}' must be start:factor:stop", key="sweep.values")
            start, factor, stop = parts
            if start <= 0.0 or factor <= 1.0 or stop < start:
                raise ConfigError(
                    f"Geometric grid '{text}' needs 0 < start <= stop and factor > 1",
                    key="sweep.values",
                )
            count = int(math.floor(math.log(stop / start) / math.log(factor) + 1e-9)) + 1
            return [float(v) for v in start * factor ** np.arange(count)]
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"Grid '{text}' is not numeric: {exc}", key="sweep.values") from exc
    if not values:
        raise ConfigError("Sweep grid is empty", key="sweep.values")
    return values


class SchemeConfig(BaseModel):
    """A controller kind and its (nonnegative) penalties."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: SchemeKind = "gamma_ddpc"
    lam: float = Field(default=1e2, ge=0.0)
    bar_lambda_alpha: float = Field(default=1e-2, ge=0.0)
    lambda_sigma: float = Field(default=1e4, ge=0.0)
    lambda1: float = Field(default=1e-8, ge=0.0)
    lambda2: float = Field(default=1e5, ge=0.0)
    beta: float = Field(default=0.0, ge=0.0)
    eta: float = Field(default=1e8, ge=0.0)
    null_output_slack: bool = False

    @property
    def penalties(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in SCHEME_PENALTIES[self.kind]}

    @property
    def tag(self) -> str:
        """Scheme label with the penalties it uses, e.g. ``spc_slack(lam=100)``."""
        if not self.penalties:
            return self.kind
        body = ",".join(f"{k}={v:g}" for k, v in self.penalties.items())
        return f"{self.kind}({body})"

    @property
    def data_driven(self) -> bool:
        return self.kind != "oracle_mpc"


class SweepSpec(BaseModel):
    """
    Swept parameters and their grids; several parameters span the Cartesian product.

    A single name and a single grid (string or list of numbers) are accepted as a
    one-parameter sweep.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    param: list[SweepParam] = Field(min_length=1)
    values: list[list[float]] = Field(min_length=1)

    @field_validator("param", mode="before")
    @classmethod
    def _single_param(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [value]
        return value

    @field_validator("values", mode="before")
    @classmethod
    def _grid_string(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [parse_grid(value)]
        if isinstance(value, list | tuple):
            if not any(isinstance(item, str | list | tuple) for item in value):
                return [list(value)]
            return [parse_grid(item) if isinstance(item, str) else item for item in value]
        return value

    @model_validator(mode="after")
    def _grids_match(self) -> SweepSpec:
        if len(self.param) != len(self.values):
            raise ValueError(f"{len(self.param)} parameters but {len(self.values)} grids")
        if len(set(self.param)) != len(self.param):
            raise ValueError(f"Parameters repeat: {self.param}")
        if any(not grid for grid in self.values):
            raise ValueError("Every sweep grid needs at least one value")
        return self

    def points(self) -> list[dict[str, float]]:
        """Every grid point, the last parameter varying fastest."""
        return [
            dict(zip(map(str, self.param), combo, strict=True))
            for combo in itertools.product(*self.values)
        ]


class ExperimentConfig(BaseModel):
    """One closed-loop Monte-Carlo experiment on the benchmark plant."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: int = 0
    n_data: int = Field(default=1000, ge=1)
    n_monte_carlo: int = Field(default=30, ge=1)
    test_length: int = Field(default=50, ge=1)
    horizon_T: int = Field(default=40, ge=1)
    rho: int | Literal["auto"] = 23
    rho_min: int = Field(default=2, ge=1)
    rho_max: int = Field(default=40, ge=1)
    snr_target_db: float = 18.0
    innovation_std: float | None = Field(default=None, ge=0.0)
    input_amplitude: float = Field(default=5.0, gt=0.0)
    x0: list[float] = Field(default_factory=lambda: [1.0, 1.0])
    q_weight: Weight = 1.0
    r_weight: Weight = 1e-3
    y_ref: PerChannel = 0.0
    u_ref: PerChannel = 0.0
    u_min: PerChannel | None = None
    u_max: PerChannel | None = None
    y_min: PerChannel | None = None
    y_max: PerChannel | None = None
    terminal_constraint: bool = False
    solver_tol: float = Field(default=1e-8, gt=0.0)
    solver_max_iter: int | None = Field(default=None, ge=1)
    scheme: SchemeConfig = Field(default_factory=SchemeConfig)
    schemes: dict[SchemeKind, SchemeConfig] = Field(default_factory=dict)
    sweep: SweepSpec | None = None

    @field_validator("rho")
    @classmethod
    def _positive_rho(cls, value: int | str) -> int | str:
        if isinstance(value, int) and value < 1:
            raise ValueError("rho must be a positive integer or 'auto'")
        return value

    @field_validator("schemes", mode="before")
    @classmethod
    def _kind_from_key(cls, value: Any) -> Any:
        if isinstance(value, dict):
            return {
                key: {"kind": key, **entry} if isinstance(entry, dict) else entry
                for key, entry in value.items()
            }
        return value

    @model_validator(mode="after")
    def _consistent(self) -> ExperimentConfig:
        if self.rho_min > self.rho_max:
            raise ValueError(f"rho_min={self.rho_min} exceeds rho_max={self.rho_max}")
        for key, entry in self.schemes.items():
            if entry.kind != key:
                raise ValueError(f"schemes.{key} declares kind '{entry.kind}'")
        return self

    @property
    def noise_free(self) -> bool:
        return self.innovation_std == 0.0

    @property
    def excitation(self) -> ExcitationSpec:
        return ExcitationSpec(low=-self.input_amplitude, high=self.input_amplitude)

    def control_spec(self, rho: int, m_inputs: int = 1, p_outputs: int = 1) -> ControlSpec:
        return ControlSpec.create(
            horizon_T=self.horizon_T,
            rho=rho,
            m_inputs=m_inputs,
            p_outputs=p_outputs,
            q_weight=self.q_weight,
            r_weight=self.r_weight,
            y_ref=self.y_ref,
            u_ref=self.u_ref,
            u_min=self.u_min,
            u_max=self.u_max,
            y_min=self.y_min,
            y_max=self.y_max,
            terminal_constraint=self.terminal_constraint,
        )

    def scheme_for(self, kind: str) -> SchemeConfig:
        """Per-scheme penalties from ``[schemes.<kind>]``, else the main scheme's values."""
        if kind not in SCHEME_KINDS:
            raise ConfigError(f"Unknown scheme '{kind}'", key="schemes")
        if kind in self.schemes:
            return self.schemes[kind]
        return self.scheme.model_copy(update={"kind": kind})

    def with_scheme(self, scheme: SchemeConfig) -> ExperimentConfig:
        return self.model_copy(update={"scheme": scheme})

    def with_value(self, param: str, value: float) -> ExperimentConfig:
        """Copy with one sweep parameter set, re-validated."""
        return self.with_values({param: value})

    def with_values(self, point: dict[str, float]) -> ExperimentConfig:
        """Copy with every parameter of a sweep point set, re-validated once."""
        data = self.model_dump()
        for param, value in point.items():
            if param in PENALTY_PARAMS:
                data["scheme"][param] = value
            elif param in EXPERIMENT_PARAMS:
                data[param] = int(round(value)) if param in INTEGER_PARAMS else value
            else:
                raise ConfigError(f"Unknown sweep parameter '{param}'", key="sweep.param")
        return validate_config(data)

    def fingerprint(self) -> str:
        """Canonical JSON of every field that influences results."""
        return self.model_dump_json(exclude={"sweep", "schemes"})


def _dotted(loc: tuple[int | str, ...]) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def validate_config(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a raw mapping; the first offending key is named in the error."""
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        errors = exc.errors()
        key = _dotted(errors[0]["loc"])
        error = ConfigError(f"Invalid config value at '{key}': {errors[0]['msg']}", key=key)
        error.details["errors"] = [
            {"key": _dotted(item["loc"]), "message": item["msg"]} for item in errors
        ]
        raise error from exc


def load_config(path: Path | str) -> ExperimentConfig:
    """
    Read an experiment TOML file.

    \b
    Example:
        seed = 7
        n_monte_carlo = 30
        rho = "auto"

        [scheme]
        kind = "spc_slack"
        lam = 1e4

        [sweep]
        param = "lam"
        values = "1e-2:10:1e6"
    """
    path = Path(path)
    if not path.is_file():
        raise DataFileError(f"Config file not found: {path}", path=path)
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"Config file {path} is not valid TOML: {exc}") from exc
    except OSError as exc:
        raise DataFileError(f"Cannot read config file {path}: {exc}", path=path) from exc
    return validate_config(data)
