"""Monitored quantities of a curve snapshot: arc-chord sup, speed defect, norms, geometry."""

from __future__ import annotations

import logging
from dataclasses import astuple, dataclass, fields

import numpy as np

from .curve import (
    TWO_PI,
    ClosedCurve,
    SpeedDegenerate,
    derivative,
    holder_seminorm,
    l2_norm,
    sobolev_norm,
)
from .kernel import KernelWorkspace, arc_chord_table, kernel_g
from .tangential import LambdaField, lambda_from_decomposition

log = logging.getLogger(__name__)

#: CSV column names, in record field order
CSV_COLUMNS = (
    "time", "F_max", "A_mean", "speed_variation", "l2_norm", "h2s_norm", "holder",
    "lambda_sup", "dlambda_sup", "dlambda_h_half", "curvature_max", "area", "perimeter",
)


@dataclass(frozen=True)
class DiagnosticsRecord:
    time: float
    F_max: float
    A_mean: float
    speed_variation: float
    l2_norm: float
    h2s_norm: float
    holder_halfplus_s: float
    lambda_sup: float
    dlambda_sup: float
    dlambda_h_half: float
    curvature_max: float
    area: float
    perimeter: float

    def as_row(self) -> tuple:
        return astuple(self)

    @classmethod
    def from_row(cls, row) -> "DiagnosticsRecord":
        return cls(*(float(v) for v in row))

    def all_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.as_row())))


assert len(fields(DiagnosticsRecord)) == len(CSV_COLUMNS)


def arc_chord(curve: ClosedCurve, full_table: bool = False, workspace: KernelWorkspace | None = None):
    """sup over node pairs of |eta| / |x(gamma) - x(gamma - eta)|.

    Raises ArcChordViolation for coincident nodes. With ``full_table`` the
    (n, n) table indexed by (node, offset) is returned as well.
    """
    ws = workspace if workspace is not None else kernel_g(curve)
    table = arc_chord_table(ws)
    fmax = float(table.max())
    return (fmax, table) if full_table else fmax


def speed_squared(curve: ClosedCurve, dx: np.ndarray | None = None) -> np.ndarray:
    dx = derivative(curve, 1) if dx is None else dx
    return dx[:, 0] ** 2 + dx[:, 1] ** 2


def speed_variation(curve: ClosedCurve, dx: np.ndarray | None = None) -> float:
    """max over nodes of | |dx|^2 - A | / A with A the node mean of |dx|^2."""
    s2 = speed_squared(curve, dx)
    A = float(np.mean(s2))
    return float(np.max(np.abs(s2 - A)) / A)


def curvature(curve: ClosedCurve) -> np.ndarray:
    dx = derivative(curve, 1)
    d2x = derivative(curve, 2)
    spd = np.sqrt(dx[:, 0] ** 2 + dx[:, 1] ** 2)
    if spd.min() <= 1e-9 * spd.mean():
        raise SpeedDegenerate("curvature undefined: speed vanishes")
    return (dx[:, 0] * d2x[:, 1] - dx[:, 1] * d2x[:, 0]) / spd**3


def area_perimeter(curve: ClosedCurve) -> tuple[float, float]:
    """Signed enclosed area (positive for counter-clockwise curves) and perimeter."""
    x = curve.points
    dx = derivative(curve, 1)
    h = TWO_PI / curve.n
    area = 0.5 * h * float(np.sum(x[:, 0] * dx[:, 1] - x[:, 1] * dx[:, 0]))
    perimeter = h * float(np.sum(np.sqrt(dx[:, 0] ** 2 + dx[:, 1] ** 2)))
    return area, perimeter


def dlambda_sobolev_half(dlambda: np.ndarray) -> float:
    return sobolev_norm(dlambda, 0.5, homogeneous=True)


def record(curve: ClosedCurve, lambda_field: LambdaField | None = None, s: float = 0.25,
           workspace: KernelWorkspace | None = None, threads: int = 1) -> DiagnosticsRecord:
    """Evaluate every monitored quantity on one snapshot."""
    ws = workspace if workspace is not None else kernel_g(curve, threads)
    lam = lambda_field if lambda_field is not None else lambda_from_decomposition(curve, ws)
    dx = ws.dx
    s2 = speed_squared(curve, dx)
    A = float(np.mean(s2))
    fmax = ws.f_max
    if 1.0 / A > fmax**2 * (1.0 + 1e-6):
        log.warning("1/A = %.6g exceeds F_max^2 = %.6g beyond grid tolerance", 1.0 / A, fmax**2)
    alpha = 0.5 + s
    if 0 < alpha < 1:
        holder = float(np.max(np.sqrt(s2))) + holder_seminorm(dx, alpha)
    else:
        holder = float("nan")
    area, perimeter = area_perimeter(curve)
    return DiagnosticsRecord(
        time=float(curve.time),
        F_max=fmax,
        A_mean=A,
        speed_variation=float(np.max(np.abs(s2 - A)) / A),
        l2_norm=l2_norm(curve),
        h2s_norm=sobolev_norm(curve, 2.0 + s),
        holder_halfplus_s=holder,
        lambda_sup=lam.sup,
        dlambda_sup=lam.dsup,
        dlambda_h_half=dlambda_sobolev_half(lam.dlam),
        curvature_max=float(np.max(np.abs(curvature(curve)))),
        area=area,
        perimeter=perimeter,
    )
