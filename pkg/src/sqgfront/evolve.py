"""Time integration of the reparametrized contour equation.

    dx/dt = integral_T (dx(g) - dx(g - eta)) / |x(g) - x(g - eta)| deta + lambda(g) dx(g)

advanced with classical RK4 at a fixed step. After each step an optional
Krasny filter removes roundoff-level Fourier modes and, when the speed
variation exceeds a trigger, the curve is projected back onto the
constant-speed parametrization. The in-flight projection is an addition to
the continuous model, which only reparametrizes the initial data.
"""

from __future__ import annotations

import logging
import math
import time as _time
from dataclasses import dataclass, field, replace

import numpy as np

from .config import SimConfig
from .curve import TWO_PI, ArcChordViolation, ClosedCurve, SpeedDegenerate
from .diagnostics import DiagnosticsRecord, record, speed_variation
from .kernel import kernel_g, nontangential_velocity
from .reparam import enforce_constant_speed
from .scenarios import make_scenario
from .tangential import lambda_from_decomposition

log = logging.getLogger(__name__)

COMPLETED = "completed"
ARC_CHORD_BLOWUP = "arc_chord_blowup"
SPEED_DEGENERATE = "speed_degenerate"
USER_LIMIT = "user_limit"


class ArcChordBlowup(ArcChordViolation):
    """F_max crossed the configured blow-up threshold."""


def rhs(curve: ClosedCurve, threads: int = 1) -> np.ndarray:
    """Contour velocity: nontangential integral plus lambda times the tangent."""
    ws = kernel_g(curve, threads)
    lam = lambda_from_decomposition(curve, ws)
    return nontangential_velocity(curve, ws) + lam.lam[:, None] * ws.dx


def rk4(curve: ClosedCurve, dt: float, threads: int = 1) -> ClosedCurve:
    """One classical Runge-Kutta step; ``dt`` may be negative."""
    x = curve.points
    k1 = rhs(curve, threads)
    k2 = rhs(curve.with_points(x + 0.5 * dt * k1), threads)
    k3 = rhs(curve.with_points(x + 0.5 * dt * k2), threads)
    k4 = rhs(curve.with_points(x + dt * k3), threads)
    return ClosedCurve(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), curve.time + dt)


def krasny_filter(curve: ClosedCurve, level: float) -> ClosedCurve:
    """Zero every Fourier mode of x1 + i x2 whose amplitude is below level * max amplitude."""
    if level <= 0:
        return curve
    z = curve.points[:, 0] + 1j * curve.points[:, 1]
    zh = np.fft.fft(z)
    amp = np.abs(zh)
    small = amp < level * amp.max()
    if not small.any():
        return curve
    zh[small] = 0.0
    z = np.fft.ifft(zh)
    return curve.with_points(np.column_stack([z.real, z.imag]))


#: RK4 stability interval on the imaginary axis is |dt * omega| <= 2*sqrt(2)
RK4_IMAG_LIMIT = 2.0 * math.sqrt(2.0)


def spectral_radius(curve: ClosedCurve, iterations: int = 40, threads: int = 1) -> float:
    """Power-iteration estimate of the largest |eigenvalue| of the linearized RHS.

    Jacobian-vector products are taken by forward differences; the start
    vector comes from a fixed seed, so the estimate is reproducible.
    """
    x = curve.points
    f0 = rhs(curve, threads)
    scale = float(np.max(np.abs(x))) or 1.0
    v = np.random.default_rng(12345).standard_normal(x.shape)
    est = 0.0
    for _ in range(iterations):
        v /= np.linalg.norm(v)
        eps = 1e-7 * scale
        jv = (rhs(curve.with_points(x + eps * v), threads) - f0) / eps
        est = float(np.linalg.norm(jv))
        v = jv
    return est


def cfl_dt(curve: ClosedCurve, cfl: float = 0.25, threads: int = 1, safety: float = 0.8) -> float:
    """Automatic step: cfl * h / max|rhs|, capped by the RK4 stability limit.

    The cap is ``safety * 2 sqrt(2) / rho`` with rho from
    :func:`spectral_radius`; the linearized operator is dispersive with
    rho growing like n log n, so the velocity-based heuristic alone is not
    stable on fine grids.
    """
    u = rhs(curve, threads)
    umax = float(np.max(np.sqrt(np.sum(u**2, axis=1))))
    h = TWO_PI / curve.n
    dt = cfl * h / max(umax, 1e-300)
    rho = spectral_radius(curve, threads=threads)
    if rho > 0:
        dt = min(dt, safety * RK4_IMAG_LIMIT / rho)
    return dt


@dataclass(frozen=True)
class StepperState:
    curve: ClosedCurve
    dt: float
    step_count: int = 0
    filter_level: float = 1e-12
    reparam_trigger: float = 1e-3
    f_threshold: float = math.inf
    threads: int = 1
    reparam_count: int = 0


def step(state: StepperState) -> StepperState:
    """Advance one RK4 step, then filter and reproject as configured.

    Raises ArcChordViolation (or ArcChordBlowup past ``f_threshold``) and
    SpeedDegenerate; the caller decides how to end the run.
    """
    if state.dt == 0:
        return replace(state, step_count=state.step_count + 1)
    new = rk4(state.curve, state.dt, state.threads)
    if not np.all(np.isfinite(new.points)):
        raise ArcChordBlowup("non-finite node positions after step")
    new = krasny_filter(new, state.filter_level)
    reparams = state.reparam_count
    if speed_variation(new) > state.reparam_trigger:
        new, _ = enforce_constant_speed(new)
        reparams += 1
    fmax = kernel_g(new, state.threads).f_max
    if not fmax < state.f_threshold:
        raise ArcChordBlowup(f"F_max = {fmax:.6g} reached threshold {state.f_threshold:.6g}")
    return replace(state, curve=new, step_count=state.step_count + 1, reparam_count=reparams)


@dataclass
class RunResult:
    config: SimConfig
    records: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    reason: str = COMPLETED
    message: str = ""
    final: ClosedCurve | None = None
    dt: float = 0.0
    steps: int = 0
    reparam_count: int = 0

    @property
    def completed(self) -> bool:
        return self.reason == COMPLETED


def plan_steps(t_end: float, dt: float) -> tuple[int, float]:
    """Number of steps and the adjusted step size that lands exactly on t_end."""
    nsteps = max(1, math.ceil(t_end / dt - 1e-9))
    return nsteps, t_end / nsteps


def initial_curve(config: SimConfig) -> ClosedCurve:
    return make_scenario(config.scenario, config.params, config.n, config.seed)


def run(config: SimConfig, curve: ClosedCurve | None = None, on_record=None) -> RunResult:
    """Evolve a scenario (or the given curve) to ``config.t_end``.

    Diagnostics are taken at step 0, every ``record_interval`` steps and at the
    final state; snapshots likewise with ``snapshot_interval`` (0 keeps only
    the first and last). Step failures end the run with a termination reason
    and keep the last good state.
    """
    threads = config.worker_threads
    curve = initial_curve(config) if curve is None else curve
    dt = config.dt if config.dt > 0 else cfl_dt(curve, config.cfl, threads)
    nsteps, dt = plan_steps(config.t_end, dt)
    result = RunResult(config, dt=dt)
    state = StepperState(curve, dt, 0, config.filter_level, config.reparam_trigger,
                         config.f_threshold, threads)

    def take_record(st):
        rec = record(st.curve, s=config.s, threads=threads)
        result.records.append(rec)
        if on_record is not None:
            on_record(rec)

    t0 = curve.time
    take_record(state)
    result.snapshots.append(state.curve)
    limit = config.max_steps if config.max_steps > 0 else None
    started = _time.perf_counter()
    while state.step_count < nsteps:
        if limit is not None and state.step_count >= limit:
            result.reason = USER_LIMIT
            result.message = f"stopped after max_steps = {limit}"
            break
        try:
            nxt = step(state)
        except ArcChordViolation as exc:
            result.reason, result.message = ARC_CHORD_BLOWUP, str(exc)
            break
        except SpeedDegenerate as exc:
            result.reason, result.message = SPEED_DEGENERATE, str(exc)
            break
        k = nxt.step_count
        # pin the clock to the step counter so no rounding accumulates
        state = replace(nxt, curve=nxt.curve.with_points(nxt.curve.points, t0 + k * dt))
        if k % config.record_interval == 0 or k == nsteps:
            take_record(state)
        if (config.snapshot_interval and k % config.snapshot_interval == 0) or k == nsteps:
            result.snapshots.append(state.curve)
    if not result.completed:
        if result.records[-1].time != state.curve.time:
            take_record(state)
        if result.snapshots[-1] is not state.curve:
            result.snapshots.append(state.curve)
        log.info("run ended early (%s) at t = %g: %s", result.reason, state.curve.time, result.message)
    result.final = state.curve
    result.steps = state.step_count
    result.reparam_count = state.reparam_count
    log.debug("%d steps in %.2f s", state.step_count, _time.perf_counter() - started)
    return result


def records_array(records: list[DiagnosticsRecord]) -> np.ndarray:
    return np.array([r.as_row() for r in records])
