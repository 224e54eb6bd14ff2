"""CSV files written by the commands."""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from ddpc_cli.exceptions import DataFileError
from ddpc_cli.harness.experiment import ClosedLoopResult
from ddpc_cli.harness.sweep import Aggregate, SweepRow
from ddpc_cli.predictor.horizon import HorizonSearch

RUN_COLUMNS = ["run_id", "scheme", "J", "J_u", "status", "run_seed", "rho"]
DIFF_COLUMNS = ["mean_dJ", "std_dJ", "mean_dJu", "std_dJu"]
SWEEP_COLUMNS = ["param", "value", *DIFF_COLUMNS]


def _write(frame: pd.DataFrame, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False)
    except OSError as exc:
        raise DataFileError(f"Cannot write {path}: {exc}", path=path) from exc
    return path


def runs_frame(results: Sequence[ClosedLoopResult]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "run_id": r.run_index,
                "scheme": r.scheme_tag,
                "J": r.j_index,
                "J_u": r.j_u_index,
                "status": r.status,
                "run_seed": r.run_seed,
                "rho": r.diagnostics.get("rho"),
            }
            for r in results
        ],
        columns=RUN_COLUMNS,
    )


def write_runs(results: Sequence[ClosedLoopResult], path: Path) -> Path:
    return _write(runs_frame(results), path)


def write_trajectories(results: Sequence[ClosedLoopResult], path: Path) -> Path:
    frames = [r.trajectory_frame() for r in results if r.u.shape[0] > 0]
    if not frames:
        return _write(pd.DataFrame(columns=["run_id", "t", "u_1", "y_1"]), path)
    return _write(pd.concat(frames, ignore_index=True), path)


def write_summary(aggregates: Sequence[Aggregate], path: Path) -> Path:
    return _write(pd.DataFrame([a.as_record() for a in aggregates]), path)


def write_sweep(rows: Sequence[SweepRow], path: Path) -> Path:
    """
    Leading columns param, value for one swept parameter, else one column per parameter,
    then mean_dJ, std_dJ, mean_dJu, std_dJu and the remaining statistics.
    """
    frame = pd.DataFrame([row.as_record() for row in rows])
    lead = list(rows[0].values) if rows and len(rows[0].values) > 1 else ["param", "value"]
    head = lead + DIFF_COLUMNS
    extra = [c for c in frame.columns if c not in head]
    return _write(frame[head + extra], path)


def write_fpe(search: HorizonSearch, path: Path) -> Path:
    return _write(search.to_frame(), path)
