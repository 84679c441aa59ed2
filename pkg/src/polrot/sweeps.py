"""Parameter-sweep grids for the four reference figures, with CSV output.

Each builder evaluates the closed-form signal and sensitivity over a 2-D
parameter grid and reduces the angle dependence to scalar summaries
(visibility, optimal operating point).  Output is deterministic: fixed row
order (first axis outer), 17-significant-digit floats, LF endings, and
lowercase inf/nan literals, so repeated runs are byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from .detection import (
    closed_form_sensitivity,
    closed_form_signal,
    optimal_sensitivity,
    visibility,
)
from .elements import PipelineSpec

__all__ = [
    "Axis",
    "SweepGrid",
    "format_value",
    "serialize_rows",
    "fig2_grid",
    "fig3_grid",
    "fig4_grid",
    "fig5_grid",
]


def format_value(x: float) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # fold -0.0
    return f"{x:.17g}"


def serialize_rows(columns: Sequence[str], rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Axis:
    """One sweep axis: count points from start to stop, linear or log."""

    name: str
    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def __post_init__(self) -> None:
        if self.count < 2:
            raise ValueError(f"axis {self.name!r} needs at least 2 points, got {self.count}")
        if self.spacing not in ("linear", "log"):
            raise ValueError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.spacing == "log" and (self.start <= 0.0 or self.stop <= 0.0):
            raise ValueError(f"log axis {self.name!r} must be strictly positive")

    def values(self) -> NDArray[np.float64]:
        if self.spacing == "log":
            return np.logspace(math.log10(self.start), math.log10(self.stop), self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True, eq=False)
class SweepGrid:
    """Result table of a sweep: axes, fixed parameters, columns, row data."""

    axes: tuple[Axis, ...]
    columns: tuple[str, ...]
    values: NDArray[np.float64]
    fixed: tuple[tuple[str, float], ...] = ()

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.float64)
        n_rows = math.prod(axis.count for axis in self.axes)
        if vals.shape != (n_rows, len(self.columns)):
            raise ValueError(
                f"result shape {vals.shape} does not match "
                f"{n_rows} grid points x {len(self.columns)} columns"
            )
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def to_csv(self) -> str:
        return serialize_rows(self.columns, self.values)

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8", newline="")


def _optimum(spec: PipelineSpec) -> tuple[float, float]:
    return optimal_sensitivity(lambda th: closed_form_sensitivity(spec, th))


def _fringe_visibility(spec: PipelineSpec) -> float:
    return visibility(lambda th: closed_form_signal(spec, th))


def fig2_grid(n: float = 10.0, t1_steps: int = 46, t2_steps: int = 46) -> SweepGrid:
    """Visibility and optimal sensitivity vs generation-loss (t1, t2)."""
    t1_axis = Axis("t1", 0.1, 1.0, t1_steps)
    t2_axis = Axis("t2", 0.1, 1.0, t2_steps)
    rows = np.empty((t1_steps * t2_steps, 5))
    i = 0
    for t1 in t1_axis.values():
        for t2 in t2_axis.values():
            spec = PipelineSpec.generation_loss(0.0, n, t1, t2)
            theta_opt, d_opt = _optimum(spec)
            rows[i] = (t1, t2, _fringe_visibility(spec), theta_opt, d_opt)
            i += 1
    return SweepGrid(
        axes=(t1_axis, t2_axis),
        columns=("t1", "t2", "visibility", "theta_opt", "delta_theta_opt"),
        values=rows,
        fixed=(("n", n),),
    )


def fig3_grid(t_steps: int = 46, n_steps: int = 20) -> SweepGrid:
    """Optimal sensitivity vs equal generation loss t and photon number n."""
    t_axis = Axis("t", 0.1, 1.0, t_steps)
    n_axis = Axis("n", 1.0, 20.0, n_steps)
    rows = np.empty((t_steps * n_steps, 6))
    i = 0
    for t in t_axis.values():
        for n in n_axis.values():
            spec = PipelineSpec.generation_loss(0.0, n, t, t)
            theta_opt, d_opt = _optimum(spec)
            rows[i] = (t, n, theta_opt, d_opt, 1.0 / (2.0 * n), 1.0 / n)
            i += 1
    return SweepGrid(
        axes=(t_axis, n_axis),
        columns=("t", "n", "theta_opt", "delta_theta_opt", "hl", "inv_n"),
        values=rows,
    )


def fig4_grid(n: float = 10.0, t_steps: int = 46, nth_steps: int = 46) -> SweepGrid:
    """Visibility and optimal sensitivity vs detection efficiency and noise."""
    t_axis = Axis("t", 0.5, 1.0, t_steps)
    nth_axis = Axis("n_th", 1e-10, 1e-1, nth_steps, spacing="log")
    rows = np.empty((t_steps * nth_steps, 5))
    i = 0
    for t in t_axis.values():
        for nth in nth_axis.values():
            spec = PipelineSpec.detection_loss(0.0, n, t, nth)
            theta_opt, d_opt = _optimum(spec)
            rows[i] = (t, nth, _fringe_visibility(spec), theta_opt, d_opt)
            i += 1
    return SweepGrid(
        axes=(t_axis, nth_axis),
        columns=("t", "n_th", "visibility", "theta_opt", "delta_theta_opt"),
        values=rows,
        fixed=(("n", n),),
    )


def fig5_grid(n_th: float = 0.1, t_steps: int = 46, n_steps: int = 20) -> SweepGrid:
    """Optimal sensitivity vs detection efficiency t and photon number n."""
    t_axis = Axis("t", 0.5, 1.0, t_steps)
    n_axis = Axis("n", 1.0, 20.0, n_steps)
    rows = np.empty((t_steps * n_steps, 6))
    i = 0
    for t in t_axis.values():
        for n in n_axis.values():
            spec = PipelineSpec.detection_loss(0.0, n, t, n_th)
            theta_opt, d_opt = _optimum(spec)
            rows[i] = (t, n, theta_opt, d_opt, 1.0 / (2.0 * n), 1.0 / n)
            i += 1
    return SweepGrid(
        axes=(t_axis, n_axis),
        columns=("t", "n", "theta_opt", "delta_theta_opt", "hl", "inv_n"),
        values=rows,
        fixed=(("n_th", n_th),),
    )
