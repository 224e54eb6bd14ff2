"""Input/output trajectories and their CSV form."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike, NDArray

from ddpc_cli.exceptions import DataFileError, ShapeError
from ddpc_cli.linalg.hankel import as_samples


@dataclass(frozen=True)
class TrajectoryBatch:
    """Time-indexed samples u(t), y(t) and, for simulated data, the innovations e(t)."""

    u: NDArray[np.float64]
    y: NDArray[np.float64]
    e: NDArray[np.float64] | None = None

    def __post_init__(self) -> None:
        u = as_samples(self.u)
        y = as_samples(self.y)
        e = None if self.e is None else as_samples(self.e)
        if u.shape[0] < 1:
            raise ShapeError("A trajectory needs at least one sample")
        if y.shape[0] != u.shape[0] or (e is not None and e.shape[0] != u.shape[0]):
            raise ShapeError(
                "u, y and e must have the same number of samples",
                {
                    "u": u.shape[0],
                    "y": y.shape[0],
                    "e": None if e is None else e.shape[0],
                },
            )
        if e is not None and e.shape[1] != y.shape[1]:
            raise ShapeError(f"Innovation has {e.shape[1]} channels, output has {y.shape[1]}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "e", e)

    @property
    def length(self) -> int:
        return int(self.u.shape[0])

    @property
    def m_inputs(self) -> int:
        return int(self.u.shape[1])

    @property
    def p_outputs(self) -> int:
        return int(self.y.shape[1])

    def window(self, start: int, stop: int) -> TrajectoryBatch:
        """Samples ``start`` (inclusive) to ``stop`` (exclusive)."""
        e = None if self.e is None else self.e[start:stop]
        return TrajectoryBatch(u=self.u[start:stop], y=self.y[start:stop], e=e)

    def to_frame(self) -> pd.DataFrame:
        """Columns t, u_1..u_m, y_1..y_p and e_1..e_p when innovations are known."""
        columns: dict[str, ArrayLike] = {"t": np.arange(self.length)}
        for i in range(self.m_inputs):
            columns[f"u_{i + 1}"] = self.u[:, i]
        for i in range(self.p_outputs):
            columns[f"y_{i + 1}"] = self.y[:, i]
        if self.e is not None:
            for i in range(self.p_outputs):
                columns[f"e_{i + 1}"] = self.e[:, i]
        return pd.DataFrame(columns)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> TrajectoryBatch:
        """Inverse of :meth:`to_frame`; column order within each group follows the suffix."""

        def channel(prefix: str) -> list[str]:
            names = [c for c in frame.columns if str(c).startswith(f"{prefix}_")]
            return sorted(names, key=lambda c: int(str(c).split("_", 1)[1]))

        u_cols, y_cols, e_cols = channel("u"), channel("y"), channel("e")
        if not u_cols or not y_cols:
            raise ShapeError("Trajectory table needs u_* and y_* columns")
        e = frame[e_cols].to_numpy(dtype=float) if e_cols else None
        return cls(
            u=frame[u_cols].to_numpy(dtype=float),
            y=frame[y_cols].to_numpy(dtype=float),
            e=e,
        )

    def to_csv(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False)
        return path

    @classmethod
    def read_csv(cls, path: Path) -> TrajectoryBatch:
        if not path.is_file():
            raise DataFileError(f"Trajectory file not found: {path}", path)
        try:
            frame = pd.read_csv(path)
        except (OSError, ValueError) as e:
            raise DataFileError(f"Cannot read trajectory file {path}: {e}", path) from e
        return cls.from_frame(frame)
