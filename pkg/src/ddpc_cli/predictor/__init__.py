"""Data-driven predictors and past-horizon selection."""

from ddpc_cli.predictor.data import (
    GammaSolution,
    InitialCondition,
    PredictorData,
    build_predictor,
    decompose_alpha,
    gamma2_for_input,
    predict_output,
    solve_gamma1,
)
from ddpc_cli.predictor.horizon import HorizonSearch, select_rho

__all__ = [
    "GammaSolution",
    "HorizonSearch",
    "InitialCondition",
    "PredictorData",
    "build_predictor",
    "decompose_alpha",
    "gamma2_for_input",
    "predict_output",
    "select_rho",
    "solve_gamma1",
]
