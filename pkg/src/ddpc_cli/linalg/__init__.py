"""Dense linear-algebra kernels for data-driven predictors."""

from ddpc_cli.linalg.factorization import (
    RANK_RTOL,
    LQFactors,
    lq_decompose,
    min_norm_solve,
    numerical_rank,
    project_rows,
    pseudo_inverse,
    row_space_split,
)
from ddpc_cli.linalg.hankel import HankelSet, build_hankel, build_hankel_set

__all__ = [
    "RANK_RTOL",
    "HankelSet",
    "LQFactors",
    "build_hankel",
    "build_hankel_set",
    "lq_decompose",
    "min_norm_solve",
    "numerical_rank",
    "project_rows",
    "pseudo_inverse",
    "row_space_split",
]
