"""Receding-horizon schemes sharing one QP assembly."""

from ddpc_cli.controllers.base import DataDrivenController, QpController
from ddpc_cli.controllers.gamma import (
    GammaDDPC,
    GammaThreeEta,
    gamma_ddpc_beta_step,
    gamma_ddpc_step,
    gamma_three_eta_step,
)
from ddpc_cli.controllers.oracle import OracleMPC, oracle_mpc_step
from ddpc_cli.controllers.registry import build_controller, default_settings
from ddpc_cli.controllers.regularized import (
    Berberich,
    ElasticNet,
    berberich_step,
    elastic_net_step,
    output_slack_selector,
)
from ddpc_cli.controllers.spc import SPC, SPCSlack, spc_slack_step, spc_step
from ddpc_cli.controllers.spec import ControlSpec, ControlStep

__all__ = [
    "SPC",
    "Berberich",
    "ControlSpec",
    "ControlStep",
    "DataDrivenController",
    "ElasticNet",
    "GammaDDPC",
    "GammaThreeEta",
    "OracleMPC",
    "QpController",
    "SPCSlack",
    "berberich_step",
    "build_controller",
    "default_settings",
    "elastic_net_step",
    "gamma_ddpc_beta_step",
    "gamma_ddpc_step",
    "gamma_three_eta_step",
    "oracle_mpc_step",
    "output_slack_selector",
    "spc_slack_step",
    "spc_step",
]
