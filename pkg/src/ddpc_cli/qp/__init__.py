"""Convex quadratic programming for the predictive-control schemes."""

from ddpc_cli.qp.admm import AdmmSolver, SolverSettings, solve
from ddpc_cli.qp.problem import (
    INFINITY,
    QpProblem,
    QpSolution,
    QpStatus,
    duality_gap,
    dump_problem,
    reformulate_l1,
)

__all__ = [
    "INFINITY",
    "AdmmSolver",
    "QpProblem",
    "QpSolution",
    "QpStatus",
    "SolverSettings",
    "duality_gap",
    "dump_problem",
    "reformulate_l1",
    "solve",
]
