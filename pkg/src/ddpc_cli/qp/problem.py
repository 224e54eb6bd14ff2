"""Normal form of every predictive-control QP.

    minimize    1/2 x' H x + f' x + constant
    subject to  A_eq x = b_eq
                lb <= A_in x <= ub
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Literal

import numpy as np
import scipy.linalg as la
from numpy.typing import ArrayLike, NDArray

from ddpc_cli.exceptions import ConfigError, ShapeError

INFINITY = 1e30

QpStatus = Literal["optimal", "infeasible", "max-iterations"]


def _matrix(values: ArrayLike | None, n_cols: int, name: str) -> NDArray[np.float64]:
    if values is None:
        return np.zeros((0, n_cols))
    m = np.asarray(values, dtype=float)
    if m.ndim == 1:
        m = m[None, :] if m.size else m.reshape(0, n_cols)
    if m.ndim != 2 or m.shape[1] != n_cols:
        raise ShapeError(f"{name} must have {n_cols} columns, got shape {m.shape}")
    return m


def _bounds(values: ArrayLike | None, size: int, fill: float, name: str) -> NDArray[np.float64]:
    if values is None:
        return np.full(size, fill)
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.shape[0] != size:
        raise ShapeError(f"{name} has {v.shape[0]} entries, expected {size}")
    return np.clip(v, -INFINITY, INFINITY)


@dataclass(frozen=True)
class QpProblem:
    h: NDArray[np.float64]
    f: NDArray[np.float64]
    a_eq: NDArray[np.float64]
    b_eq: NDArray[np.float64]
    a_in: NDArray[np.float64]
    lb: NDArray[np.float64]
    ub: NDArray[np.float64]
    constant: float = 0.0

    def __post_init__(self) -> None:
        n = self.f.shape[0]
        if self.h.shape != (n, n):
            raise ShapeError(f"H has shape {self.h.shape}, expected {(n, n)}")
        if self.a_eq.shape[0] != self.b_eq.shape[0]:
            raise ShapeError("A_eq and b_eq row counts differ")
        if not (self.a_in.shape[0] == self.lb.shape[0] == self.ub.shape[0]):
            raise ShapeError("A_in, lb and ub row counts differ")
        asym = float(np.max(np.abs(self.h - self.h.T), initial=0.0))
        if asym > 1e-10 * max(1.0, float(np.max(np.abs(self.h), initial=0.0))):
            raise ShapeError(f"H is not symmetric (max asymmetry {asym:.3e})")
        if np.any(self.lb > self.ub):
            raise ShapeError("Inequality bounds have lb > ub")

    @classmethod
    def build(
        cls,
        h: ArrayLike,
        f: ArrayLike,
        *,
        a_eq: ArrayLike | None = None,
        b_eq: ArrayLike | None = None,
        a_in: ArrayLike | None = None,
        lb: ArrayLike | None = None,
        ub: ArrayLike | None = None,
        constant: float = 0.0,
    ) -> QpProblem:
        """Build a problem, omitted constraint blocks being empty and bounds infinite."""
        fv = np.asarray(f, dtype=float).reshape(-1)
        n = fv.shape[0]
        hm = np.atleast_2d(np.asarray(h, dtype=float)).reshape(n, n) if n else np.zeros((0, 0))
        eq = _matrix(a_eq, n, "A_eq")
        ineq = _matrix(a_in, n, "A_in")
        return cls(
            h=hm,
            f=fv,
            a_eq=eq,
            b_eq=_bounds(b_eq, eq.shape[0], 0.0, "b_eq"),
            a_in=ineq,
            lb=_bounds(lb, ineq.shape[0], -INFINITY, "lb"),
            ub=_bounds(ub, ineq.shape[0], INFINITY, "ub"),
            constant=constant,
        )

    @property
    def n_variables(self) -> int:
        return int(self.f.shape[0])

    @property
    def n_eq(self) -> int:
        return int(self.a_eq.shape[0])

    @property
    def n_in(self) -> int:
        return int(self.a_in.shape[0])

    def objective(self, x: NDArray[np.float64]) -> float:
        return float(0.5 * x @ self.h @ x + self.f @ x + self.constant)

    def stacked_constraints(
        self,
    ) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
        """(A, l, u) with the equality rows first, as l = u."""
        a = np.vstack((self.a_eq, self.a_in))
        lower = np.concatenate((self.b_eq, self.lb))
        upper = np.concatenate((self.b_eq, self.ub))
        return a, lower, upper

    def with_vectors(
        self,
        f: ArrayLike | None = None,
        b_eq: ArrayLike | None = None,
        lb: ArrayLike | None = None,
        ub: ArrayLike | None = None,
        constant: float | None = None,
    ) -> QpProblem:
        """Same matrices, new vectors."""
        changes: dict[str, Any] = {}
        if f is not None:
            changes["f"] = _bounds(f, self.n_variables, 0.0, "f")
        if b_eq is not None:
            changes["b_eq"] = _bounds(b_eq, self.n_eq, 0.0, "b_eq")
        if lb is not None:
            changes["lb"] = _bounds(lb, self.n_in, -INFINITY, "lb")
        if ub is not None:
            changes["ub"] = _bounds(ub, self.n_in, INFINITY, "ub")
        if constant is not None:
            changes["constant"] = constant
        return replace(self, **changes)


@dataclass(frozen=True)
class QpSolution:
    x: NDArray[np.float64]
    objective: float
    status: QpStatus
    iterations: int
    primal_residual: float
    dual_residual: float
    dual_eq: NDArray[np.float64]
    dual_in: NDArray[np.float64]
    certificate: str | None = None
    certificate_residual: float | None = None
    polished: bool = False

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    def summary(self) -> dict[str, Any]:
        stats: dict[str, Any] = {
            "status": self.status,
            "iterations": self.iterations,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "polished": self.polished,
        }
        if self.certificate is not None:
            stats["certificate"] = self.certificate
            stats["certificate_residual"] = self.certificate_residual
        return stats


def reformulate_l1(p: QpProblem, weight: float, selector: ArrayLike) -> QpProblem:
    """
    Add ``weight * ||S x||_1`` to the objective through split variables.

    The returned problem has variables [x; s_plus; s_minus] with S x = s_plus - s_minus,
    s_plus, s_minus >= 0 and linear cost weight * 1'(s_plus + s_minus).

    Args:
        p: Original problem.
        weight: Nonnegative l1 weight.
        selector: Matrix S with ``p.n_variables`` columns.

    Returns:
        The augmented problem; its first ``p.n_variables`` entries are x.
    """
    if weight < 0.0:
        raise ConfigError(f"l1 weight must be nonnegative, got {weight}", key="lambda1")
    s = _matrix(selector, p.n_variables, "selector")
    k, n = s.shape[0], p.n_variables
    eye = np.eye(k)

    h = la.block_diag(p.h, np.zeros((2 * k, 2 * k)))
    f = np.concatenate((p.f, np.full(2 * k, weight)))
    a_eq = np.vstack(
        (
            np.hstack((p.a_eq, np.zeros((p.n_eq, 2 * k)))),
            np.hstack((s, -eye, eye)),
        )
    )
    a_in = np.vstack(
        (
            np.hstack((p.a_in, np.zeros((p.n_in, 2 * k)))),
            np.hstack((np.zeros((2 * k, n)), np.eye(2 * k))),
        )
    )
    return QpProblem(
        h=h,
        f=f,
        a_eq=a_eq,
        b_eq=np.concatenate((p.b_eq, np.zeros(k))),
        a_in=a_in,
        lb=np.concatenate((p.lb, np.zeros(2 * k))),
        ub=np.concatenate((p.ub, np.full(2 * k, INFINITY))),
        constant=p.constant,
    )


def duality_gap(p: QpProblem, solution: QpSolution) -> float:
    """x'Hx + f'x + u'y+ + l'y- at a primal-dual pair (zero at the optimum)."""
    x = solution.x
    y = np.concatenate((solution.dual_eq, solution.dual_in))
    _, lower, upper = p.stacked_constraints()
    y_pos, y_neg = np.maximum(y, 0.0), np.minimum(y, 0.0)
    upper_term = np.where(upper >= INFINITY, 0.0, upper * y_pos)
    lower_term = np.where(lower <= -INFINITY, 0.0, lower * y_neg)
    return float(x @ p.h @ x + p.f @ x + upper_term.sum() + lower_term.sum())


def dump_problem(p: QpProblem, path: Path) -> Path:
    """Write dimensions and dense blocks as plain text for external cross-checks."""
    path.parent.mkdir(parents=True, exist_ok=True)
    blocks = (
        ("h", p.h),
        ("f", p.f[None, :]),
        ("a_eq", p.a_eq),
        ("b_eq", p.b_eq[None, :]),
        ("a_in", p.a_in),
        ("lb", p.lb[None, :]),
        ("ub", p.ub[None, :]),
    )
    with path.open("w") as fh:
        fh.write(f"# qp n={p.n_variables} n_eq={p.n_eq} n_in={p.n_in} constant={p.constant!r}\n")
        for name, block in blocks:
            fh.write(f"{name} {block.shape[0]} {block.shape[1]}\n")
            if block.size:
                np.savetxt(fh, block, fmt="%.17g")
    return path
