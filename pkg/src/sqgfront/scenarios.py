"""Canned initial curves.

Every generator returns a constant-speed curve anchored at gamma = -pi.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .curve import ClosedCurve, Grid, ArcChordViolation
from .kernel import kernel_g
from .reparam import enforce_constant_speed
from .diagnostics import speed_variation


@dataclass(frozen=True)
class Scenario:
    name: str
    generator: Callable
    defaults: dict
    n: int
    dt: float
    t_end: float


def radial_graph(n: int, radius: Callable, theta0: float = 0.0) -> ClosedCurve:
    """Curve r(theta) (cos theta, sin theta) with theta running from theta0 at gamma = -pi."""
    theta = Grid(n).nodes + theta0 + np.pi
    r = radius(theta)
    return ClosedCurve(np.column_stack([r * np.cos(theta), r * np.sin(theta)]))


#: speed variation accepted for generated initial data
SPEED_TOL = 1e-10


def _project(curve: ClosedCurve, max_passes: int = 4) -> ClosedCurve:
    """Constant-speed projection, repeated while the interpolated speed still ripples.

    One pass is exact up to the truncation of the speed interpolant, which
    matters for data with a slowly decaying spectrum.
    """
    out = curve
    for _ in range(max_passes):
        out, _ = enforce_constant_speed(out)
        if speed_variation(out) <= SPEED_TOL:
            break
    kernel_g(out)  # rejects self-intersecting or degenerate output
    return out


def circle(n, R=1.0):
    if not R > 0:
        raise ValueError(f"circle radius must be > 0, got {R}")
    g = Grid(n).nodes
    return ClosedCurve(np.column_stack([R * np.cos(g), R * np.sin(g)]))


def ellipse(n, a=1.2, b=0.8):
    g = Grid(n).nodes
    return _project(ClosedCurve(np.column_stack([a * np.cos(g), b * np.sin(g)])))


def perturbed_circle(n, amplitude=0.05, mode=3):
    mode = int(mode)
    g = Grid(n).nodes
    r = 1.0 + amplitude * np.cos(mode * g)
    return _project(ClosedCurve(np.column_stack([r * np.cos(g), r * np.sin(g)])))


def rough_coefficients(kmax: int, s: float, seed: int, c: float):
    """Amplitudes a_k = c k^-(2.5+s+0.01) u_k and phases for k = 2..kmax.

    Draws are made in pairs (u_k, theta_k) in increasing k, so a larger kmax
    extends the same random sequence.
    """
    rng = np.random.default_rng(seed)
    draws = rng.uniform(size=(max(kmax - 1, 0), 2))
    k = np.arange(2, kmax + 1)
    u = 2.0 * draws[:, 0] - 1.0
    theta = 2.0 * np.pi * draws[:, 1]
    return k, c * k ** (-(2.5 + s + 0.01)) * u, theta


def rough_h2s(n, s=0.25, seed=0, c=0.5):
    """Radial graph whose Fourier tail sits just inside H^(2+s)."""
    k, a, theta = rough_coefficients(n // 4, s, int(seed), c)
    g = Grid(n).nodes
    r = 1.0 + np.sum(a[:, None] * np.cos(np.outer(k, g) + theta[:, None]), axis=0)
    if r.min() <= 0:
        raise ArcChordViolation("rough radial graph crosses the origin; reduce c")
    return _project(ClosedCurve(np.column_stack([r * np.cos(g), r * np.sin(g)])))


def cassini_radius(theta, a=1.0, d=0.05):
    """Cassini oval through the neck points (0, +-d/2); two lobes along the x axis."""
    b4 = (a * a + 0.25 * d * d) ** 2
    c2 = np.cos(2 * theta)
    return np.sqrt(a * a * c2 + np.sqrt(a**4 * c2 * c2 + b4 - a**4))


def filament_probe(n, d=0.1, a=1.0, oversample=4):
    """Two lobes joined by a neck of width d.

    Node 0 sits on the lower neck point and node n/2 on the upper one, so the
    neck pair is separated by eta = pi and F_max is close to pi/d.

    The configuration is mirror symmetric, so the neck width is even in time:
    the lobes merge and the neck widens whichever way the curve is evolved.
    """
    fine = radial_graph(n * oversample, lambda th: cassini_radius(th, a, d), theta0=-np.pi / 2)
    fine, _ = enforce_constant_speed(fine)
    return _project(ClosedCurve(fine.points[::oversample]))


def filament_prediction(d: float) -> float:
    return np.pi / d


SCENARIOS = {
    "circle": Scenario("circle", circle, {"R": 1.0}, 256, 1e-3, 0.1),
    "ellipse": Scenario("ellipse", ellipse, {"a": 1.2, "b": 0.8}, 256, 5e-4, 0.5),
    "perturbed_circle": Scenario("perturbed_circle", perturbed_circle,
                                 {"amplitude": 0.05, "mode": 3}, 256, 5e-4, 0.5),
    "rough_h2s": Scenario("rough_h2s", rough_h2s, {"s": 0.25, "seed": 0, "c": 0.5}, 512, 2.5e-4, 0.05),
    "filament_probe": Scenario("filament_probe", filament_probe, {"d": 0.1, "a": 1.0}, 1024, 0.0, 0.5),
}


def make_scenario(name: str, params: dict | None = None, n: int | None = None,
                  seed: int | None = None) -> ClosedCurve:
    try:
        sc = SCENARIOS[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    kwargs = dict(sc.defaults)
    for key, value in (params or {}).items():
        if key not in sc.defaults and key != "oversample":
            raise ValueError(f"scenario {name!r} has no parameter {key!r}")
        kwargs[key] = value
    if seed is not None and "seed" in kwargs and "seed" not in (params or {}):
        kwargs["seed"] = seed
    return sc.generator(n or sc.n, **kwargs)
