"""Construct a controller from its scheme configuration."""

from __future__ import annotations

from typing import TYPE_CHECKING

from ddpc_cli.controllers.base import QpController
from ddpc_cli.controllers.gamma import GammaDDPC, GammaThreeEta
from ddpc_cli.controllers.oracle import OracleMPC
from ddpc_cli.controllers.regularized import Berberich, ElasticNet
from ddpc_cli.controllers.spc import SPC, SPCSlack
from ddpc_cli.controllers.spec import ControlSpec
from ddpc_cli.exceptions import ConfigError
from ddpc_cli.plant.system import LinearSystem
from ddpc_cli.predictor.data import PredictorData
from ddpc_cli.qp.admm import SolverSettings

if TYPE_CHECKING:
    from ddpc_cli.models.config import SchemeConfig


def build_controller(
    scheme: SchemeConfig,
    pd: PredictorData | None,
    spec: ControlSpec,
    system: LinearSystem | None = None,
    settings: SolverSettings | None = None,
) -> QpController:
    """
    The oracle needs ``system``; every other scheme needs ``pd``.

    ``settings`` of None keeps each scheme's own solver defaults.
    """
    if scheme.kind == "oracle_mpc":
        if system is None:
            raise ConfigError("oracle_mpc needs the true plant", key="scheme.kind")
        return OracleMPC(system, spec, settings)
    if pd is None:
        raise ConfigError(f"{scheme.kind} needs a predictor built from data", key="scheme.kind")

    match scheme.kind:
        case "spc":
            return SPC(pd, spec, settings)
        case "spc_slack":
            return SPCSlack(pd, spec, scheme.lam, settings=settings)
        case "berberich":
            return Berberich(
                pd,
                spec,
                scheme.bar_lambda_alpha,
                scheme.lambda_sigma,
                null_output_slack=scheme.null_output_slack,
                settings=settings,
            )
        case "elastic_net":
            return ElasticNet(pd, spec, scheme.lambda1, scheme.lambda2, settings)
        case "gamma_ddpc":
            return GammaDDPC(pd, spec, settings=settings)
        case "gamma_ddpc_beta":
            return GammaDDPC(pd, spec, beta=scheme.beta, settings=settings)
        case "gamma_three_eta":
            return GammaThreeEta(pd, spec, scheme.eta, settings)
    raise ConfigError(f"Unknown scheme '{scheme.kind}'", key="scheme.kind")


def default_settings(kind: str) -> SolverSettings:
    """Solver defaults of a scheme, before config overrides."""
    classes: dict[str, type[QpController]] = {
        "oracle_mpc": OracleMPC,
        "spc": SPC,
        "spc_slack": SPCSlack,
        "berberich": Berberich,
        "elastic_net": ElasticNet,
        "gamma_ddpc": GammaDDPC,
        "gamma_ddpc_beta": GammaDDPC,
        "gamma_three_eta": GammaThreeEta,
    }
    if kind not in classes:
        raise ConfigError(f"Unknown scheme '{kind}'", key="scheme.kind")
    return classes[kind].default_settings
