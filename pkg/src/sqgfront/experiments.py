"""Studies built on the simulator: twin-run stability, self-convergence and regularization.

The canned initial curves live in :mod:`sqgfront.scenarios` and are re-exported
here.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .config import SimConfig
from .curve import TWO_PI, ArcChordViolation, ClosedCurve, SpeedDegenerate, derivative, sobolev_norm
from .diagnostics import speed_variation
from .evolve import (
    ARC_CHORD_BLOWUP,
    COMPLETED,
    SPEED_DEGENERATE,
    ArcChordBlowup,
    cfl_dt,
    initial_curve,
    krasny_filter,
    plan_steps,
    rk4,
    run,
)
from .reparam import enforce_constant_speed, regularize
from .scenarios import SCENARIOS, Scenario, filament_prediction, make_scenario  # noqa: F401

log = logging.getLogger(__name__)


# --------------------------------------------------------------------- twin run

@dataclass
class TwinRunReport:
    times: list = field(default_factory=list)
    d_h1: list = field(default_factory=list)
    d_speed: list = field(default_factory=list)
    d_total: list = field(default_factory=list)
    fitted_C: float = float("nan")
    intercept: float = float("nan")
    fit_residual: float = float("nan")
    reason: str = COMPLETED
    message: str = ""
    dt: float = 0.0
    reparam_count: int = 0

    def rows(self):
        return list(zip(self.times, self.d_h1, self.d_speed, self.d_total))


def normal_perturbation(curve: ClosedCurve, delta: float, mode: int = 2) -> ClosedCurve:
    """Displace by delta*cos(mode*gamma) along the unit normal, then reproject.

    delta = 0 returns the curve itself so both twins start bit-identical.
    """
    if delta == 0:
        return curve
    dx = derivative(curve, 1)
    spd = np.sqrt(np.sum(dx**2, axis=1))
    normal = np.column_stack([dx[:, 1], -dx[:, 0]]) / spd[:, None]
    bump = delta * np.cos(mode * curve.grid.nodes)
    out, _ = enforce_constant_speed(curve.with_points(curve.points + bump[:, None] * normal))
    return out


def twin_distance(x: ClosedCurve, y: ClosedCurve) -> tuple[float, float, float]:
    """(||x - y||_H1, |A_x^1/2 - A_y^1/2|, their Euclidean combination)."""
    d_h1 = sobolev_norm(x.points - y.points, 1.0)
    ax = math.sqrt(float(np.mean(np.sum(derivative(x, 1) ** 2, axis=1))))
    ay = math.sqrt(float(np.mean(np.sum(derivative(y, 1) ** 2, axis=1))))
    d_speed = abs(ax - ay)
    return d_h1, d_speed, math.hypot(d_h1, d_speed)


def fit_growth(times, d_total) -> tuple[float, float, float]:
    """Least-squares line through log d_total: returns (slope C, intercept, max log residual).

    Zero distances carry no growth information and give C = 0.
    """
    t = np.asarray(times, dtype=float)
    d = np.asarray(d_total, dtype=float)
    keep = d > 0
    if keep.sum() < 2:
        return 0.0, float("-inf"), 0.0
    t, ell = t[keep], np.log(d[keep])
    C, b = np.polyfit(t, ell, 1)
    resid = float(np.max(np.abs(ell - (b + C * t))))
    return float(C), float(b), resid


def twin_run(config: SimConfig, delta: float, mode: int = 2) -> TwinRunReport:
    """Evolve a scenario and a delta-perturbed copy side by side.

    Both runs use the same step, filter and grid. When either twin's speed
    variation passes the trigger, both are reprojected, which keeps the
    node correspondence used by the H1 distance.
    """
    if delta < 0:
        raise ValueError(f"perturbation size must be >= 0, got {delta}")
    threads = config.worker_threads
    x = initial_curve(config)
    y = normal_perturbation(x, delta, mode)
    dt = config.dt if config.dt > 0 else cfl_dt(x, config.cfl, threads)
    nsteps, dt = plan_steps(config.t_end, dt)
    rep = TwinRunReport(dt=dt)

    def take(k, a, b):
        d = twin_distance(a, b)
        rep.times.append(x0_time + k * dt)
        rep.d_h1.append(d[0])
        rep.d_speed.append(d[1])
        rep.d_total.append(d[2])

    x0_time = x.time
    take(0, x, y)
    for k in range(1, nsteps + 1):
        try:
            xn = krasny_filter(rk4(x, dt, threads), config.filter_level)
            yn = krasny_filter(rk4(y, dt, threads), config.filter_level)
            if not (np.all(np.isfinite(xn.points)) and np.all(np.isfinite(yn.points))):
                raise ArcChordBlowup("non-finite node positions after step")
            if max(speed_variation(xn), speed_variation(yn)) > config.reparam_trigger:
                xn, _ = enforce_constant_speed(xn)
                yn, _ = enforce_constant_speed(yn)
                rep.reparam_count += 1
        except ArcChordViolation as exc:
            rep.reason, rep.message = ARC_CHORD_BLOWUP, str(exc)
            break
        except SpeedDegenerate as exc:
            rep.reason, rep.message = SPEED_DEGENERATE, str(exc)
            break
        x, y = xn, yn
        if k % config.record_interval == 0 or k == nsteps:
            take(k, x, y)
    rep.fitted_C, rep.intercept, rep.fit_residual = fit_growth(rep.times, rep.d_total)
    return rep


# ------------------------------------------------------------ convergence study

@dataclass
class ConvergenceReport:
    scenario: str
    t_end: float
    spatial_n: list
    spatial_dt: float
    spatial_reference_n: int
    spatial_errors: list
    spatial_orders: list
    temporal_n: int
    temporal_dt: list
    temporal_reference_dt: float
    temporal_errors: list
    temporal_orders: list
    temporal_ratios: list

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _orders(errors, factors):
    out = []
    for (e0, e1), f in zip(zip(errors, errors[1:]), factors):
        out.append(math.log(e0 / e1) / math.log(f) if e0 > 0 and e1 > 0 else float("nan"))
    return out


def _terminal(base: SimConfig, n: int, dt: float) -> ClosedCurve:
    res = run(base.replace(n=n, dt=dt, record_interval=10**9))
    if not res.completed:
        raise RuntimeError(f"convergence run n={n}, dt={dt} ended early: {res.reason} {res.message}")
    return res.final


def node_error(coarse: ClosedCurve, fine: ClosedCurve) -> float:
    """Max node distance after subsampling ``fine`` onto the coarse grid."""
    stride = fine.n // coarse.n
    if stride * coarse.n != fine.n:
        raise ValueError(f"reference size {fine.n} is not a multiple of {coarse.n}")
    diff = coarse.points - fine.points[::stride]
    return float(np.max(np.sqrt(np.sum(diff**2, axis=1))))


def convergence_study(scenario: str, n_list, dt_list, t_end: float = 0.1,
                      params: dict | None = None, reference_factor: int = 4,
                      threads: int = 1) -> ConvergenceReport:
    """Terminal-state self-convergence in n and in dt.

    Spatial: every n in ``n_list`` runs at the smallest dt of ``dt_list`` and
    is compared with a ``reference_factor * max(n)`` run. Temporal: the
    smallest n runs at each dt and is compared with a dt/``reference_factor``
    run. Filtering and in-flight reprojection are switched off so every run
    integrates the same semi-discrete system.
    """
    n_list = sorted(int(n) for n in n_list)
    dt_list = sorted((float(d) for d in dt_list), reverse=True)
    base = SimConfig(scenario=scenario, params=dict(params or {}), t_end=t_end,
                     filter_level=0.0, reparam_trigger=math.inf, threads=threads)
    dt_s = dt_list[-1]
    n_ref = reference_factor * n_list[-1]
    ref = _terminal(base, n_ref, dt_s)
    s_err = [node_error(_terminal(base, n, dt_s), ref) for n in n_list]
    s_ord = _orders(s_err, [b / a for a, b in zip(n_list, n_list[1:])])

    n_t = n_list[0]
    dt_ref = dt_list[-1] / reference_factor
    tref = _terminal(base, n_t, dt_ref)
    t_err = [node_error(_terminal(base, n_t, dt), tref) for dt in dt_list]
    t_ord = _orders(t_err, [a / b for a, b in zip(dt_list, dt_list[1:])])
    t_rat = [e0 / e1 if e1 > 0 else float("inf") for e0, e1 in zip(t_err, t_err[1:])]
    return ConvergenceReport(scenario, t_end, n_list, dt_s, n_ref, s_err, s_ord,
                             n_t, dt_list, dt_ref, t_err, t_ord, t_rat)


# --------------------------------------------------------- regularization study

@dataclass
class RegularizationReport:
    eps: list
    errors: list
    s: float

    @property
    def monotone(self) -> bool:
        return all(b < a for a, b in zip(self.errors, self.errors[1:]))

    @property
    def ratios(self) -> list:
        return [b / a if a > 0 else float("nan") for a, b in zip(self.errors, self.errors[1:])]


def regularization_study(curve: ClosedCurve, eps_list, s: float = 0.25,
                         require_monotone: bool = False) -> RegularizationReport:
    """H^(2+s) distance between the mollified-and-reprojected curve and the original.

    ``eps_list`` should descend towards 0. With ``require_monotone`` a
    non-decreasing error sequence raises ValueError.
    """
    eps_list = [float(e) for e in eps_list]
    if any(b > a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be descending")
    errors = []
    for eps in eps_list:
        reg = curve if eps == 0 else regularize(curve, eps)
        errors.append(sobolev_norm(reg.points - curve.points, 2.0 + s))
    rep = RegularizationReport(eps_list, errors, s)
    if require_monotone and not rep.monotone:
        raise ValueError(f"regularization error is not decreasing: {errors}")
    return rep
