"""Mollification and projection onto the constant-speed parametrization.

The projection builds the normalized arc-length map

    phi(xi) = -pi + (2pi/L) * integral_{-pi}^{xi} |dx(g)| dg,   L = integral_T |dx|,

inverts it node by node and resamples the curve at phi^{-1}(gamma_i) through
its trigonometric interpolant, so that the new speed is L/(2pi) everywhere.
The point at gamma = -pi is kept fixed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import TWO_PI, ClosedCurve, Grid, SpeedDegenerate, derivative, eval_series, interp_at, to_spectral

NEWTON_TOL = 1e-13
NEWTON_MAX_ITER = 100
MIN_RELATIVE_SPEED = 1e-9


class ReparamFailure(SpeedDegenerate):
    """Inversion of the arc-length map did not converge."""


@dataclass(frozen=True)
class ReparamMap:
    phi: np.ndarray
    phi_inverse_at_nodes: np.ndarray
    total_length: float


def gaussian_multiplier(k, eps: float) -> np.ndarray:
    return np.exp(-0.5 * (eps * np.asarray(k, dtype=float)) ** 2)


def mollify(curve: ClosedCurve, eps: float) -> ClosedCurve:
    """Convolve with a Gaussian approximate identity, x_k -> exp(-(eps k)^2/2) x_k."""
    if eps < 0:
        raise ValueError(f"mollification width must be >= 0, got {eps}")
    if eps == 0:
        return curve
    x = curve.points
    mult = gaussian_multiplier(Grid(curve.n).wavenumbers, eps)
    xh = np.fft.fft(x, axis=0)
    return curve.with_points(np.fft.ifft(xh * mult[:, None], axis=0).real)


class _ArcLength:
    """Spectral representation of the cumulative speed integral."""

    def __init__(self, curve: ClosedCurve):
        n = curve.n
        dx = derivative(curve, 1)
        spd = np.sqrt(np.sum(dx**2, axis=1))
        mean = float(np.mean(spd))
        if not np.all(np.isfinite(spd)) or spd.min() <= MIN_RELATIVE_SPEED * mean:
            raise SpeedDegenerate(
                f"speed vanishes: min |dx| = {spd.min():.3e}, mean {mean:.3e}")
        spec = to_spectral(spd)
        k = spec.wavenumbers
        c = spec.coeffs.copy()
        c[0] = 0.0
        c[n // 2] = 0.0
        nz = k != 0
        anti = np.zeros_like(c)
        anti[nz] = c[nz] / (1j * k[nz])
        self.k = k
        self.speed_coeffs = c
        self.anti_coeffs = anti
        self.mean = mean
        self.length = TWO_PI * mean
        self._offset = 0.0
        self._offset = float(self._evaluate(np.array([-np.pi]))[0][0])

    def _evaluate(self, xi):
        both = eval_series(np.column_stack([self.anti_coeffs, self.speed_coeffs]), self.k, xi)
        return both[:, 0] - self._offset, both[:, 1]

    def phi_and_slope(self, xi):
        """phi(xi) and phi'(xi) from the interpolant of the speed."""
        F, dF = self._evaluate(xi)
        return xi + F / self.mean, 1.0 + dF / self.mean


def arc_length_map(curve: ClosedCurve) -> tuple[np.ndarray, float]:
    """phi at the grid nodes and the total length L."""
    arc = _ArcLength(curve)
    phi, _ = arc.phi_and_slope(Grid(curve.n).nodes)
    return phi, arc.length


def _invert(arc: _ArcLength, nodes: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Solve phi(xi) = target per node by Newton's method inside a bisection bracket."""
    phi_nodes, _ = arc.phi_and_slope(nodes)
    xs = np.concatenate([nodes, [np.pi]])
    ps = np.concatenate([phi_nodes, [np.pi]])
    if np.any(np.diff(ps) <= 0):
        raise SpeedDegenerate("arc-length map is not increasing on the grid")
    pos = np.clip(np.searchsorted(ps, targets, side="right") - 1, 0, len(nodes) - 1)
    lo, hi = xs[pos].copy(), xs[pos + 1].copy()
    xi = np.interp(targets, ps, xs)
    active = np.ones(targets.shape, dtype=bool)
    for _ in range(NEWTON_MAX_ITER):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return xi
        p, dp = arc.phi_and_slope(xi[idx])
        resid = p - targets[idx]
        below = resid < 0
        lo[idx] = np.where(below, xi[idx], lo[idx])
        hi[idx] = np.where(below, hi[idx], xi[idx])
        with np.errstate(divide="ignore", invalid="ignore"):
            trial = xi[idx] - resid / dp
        bad = ~np.isfinite(trial) | (trial < lo[idx]) | (trial > hi[idx])
        trial = np.where(bad, 0.5 * (lo[idx] + hi[idx]), trial)
        step = np.abs(trial - xi[idx])
        xi[idx] = trial
        done = (step <= NEWTON_TOL) | (resid == 0.0)
        active[idx[done]] = False
    if np.any(active):
        raise ReparamFailure(
            f"arc-length inversion did not converge in {NEWTON_MAX_ITER} iterations "
            f"at {int(active.sum())} node(s)")
    return xi


def enforce_constant_speed(curve: ClosedCurve) -> tuple[ClosedCurve, ReparamMap]:
    """Resample ``curve`` at phi^{-1}(gamma_i) so that |dx/dgamma| = L/(2pi)."""
    arc = _ArcLength(curve)
    nodes = Grid(curve.n).nodes
    phi, _ = arc.phi_and_slope(nodes)
    xi = np.empty_like(nodes)
    xi[0] = -np.pi
    xi[1:] = _invert(arc, nodes, nodes[1:].copy())
    points = interp_at(curve, xi)
    points[0] = curve.points[0]
    return curve.with_points(points), ReparamMap(phi, xi, arc.length)


def regularize(curve: ClosedCurve, eps: float) -> ClosedCurve:
    """Mollify, then project onto the constant-speed parametrization."""
    out, _ = enforce_constant_speed(mollify(curve, eps))
    return out
