"""Tangential speed lambda(gamma, t) that keeps |dx/dgamma|^2 independent of gamma.

Two routes are provided:

* :func:`lambda_direct` integrates the explicit formula
      lambda(g) = (pi + g)/(2pi) * W - integral_{-pi}^{g} w(xi) dxi,
  with w(xi) = integral_T d/dgamma(dx_- g) . dx(xi) / |dx(xi)|^2 deta and W its
  integral over the torus;
* :func:`lambda_from_decomposition` integrates d(lambda)/dgamma written as
  Gamma1 + Gamma2 + Gamma3, which uses the constant-speed identities
  dx(g).d2x_-(g) = -dx_-(g).d2x(g - eta) and dx(g).dx_- = |dx_-|^2 / 2.

The decomposition is the production path for time stepping; the direct formula
serves as an independent cross-check. Both anchor lambda(-pi) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import TWO_PI, ClosedCurve, Grid
from .kernel import KernelWorkspace, dgamma_g, kernel_g, map_rows, shifted


@dataclass(frozen=True)
class LambdaField:
    """lambda and d(lambda)/dgamma on the grid.

    ``lambda_end`` is the value reached at gamma = +pi by the cumulative
    integral; it vanishes up to quadrature error.
    """

    lam: np.ndarray
    dlam: np.ndarray
    gamma3: float
    A: float
    lambda_end: float

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.lam)))

    @property
    def dsup(self) -> float:
        return float(np.max(np.abs(self.dlam)))


def cumulative_trapezoid(f: np.ndarray, h: float) -> tuple[np.ndarray, float]:
    """Cumulative trapezoidal integral from gamma_0 = -pi at every node, plus the wrap value at +pi."""
    inc = 0.5 * h * (f + np.roll(f, -1))
    c = np.concatenate([[0.0], np.cumsum(inc)])
    return c[:-1], float(c[-1])


def _workspace(curve, workspace, threads):
    return workspace if workspace is not None else kernel_g(curve, threads)


def tangent_modulus(workspace: KernelWorkspace) -> float:
    """A(t): node mean of |dx|^2."""
    dx = workspace.dx
    return float(np.mean(dx[:, 0] ** 2 + dx[:, 1] ** 2))


def lambda_direct(curve: ClosedCurve, workspace: KernelWorkspace | None = None,
                  threads: int = 1) -> LambdaField:
    ws = _workspace(curve, workspace, threads)
    n, h = ws.n, ws.spacing
    dg = dgamma_g(curve, ws)
    d2x, dx = ws.d2x, ws.dx
    d2xs = [shifted(d2x[:, c]) for c in range(2)]
    speed2 = dx[:, 0] ** 2 + dx[:, 1] ** 2

    def rows(sl):
        g, dgs = ws.g[sl], dg[sl]
        acc = None
        for c in range(2):
            d2xm = d2x[sl, c, None] - d2xs[c][sl]
            term = (d2xm * g + ws.dxm[c, sl] * dgs) * dx[sl, c, None]
            acc = term if acc is None else acc + term
        return np.sum(acc, axis=1)

    w = h * np.concatenate(map_rows(rows, n, ws.threads)) / speed2
    W = h * float(np.sum(w))
    cum, _ = cumulative_trapezoid(w, h)
    gamma = Grid(n).nodes
    lam = (np.pi + gamma) / TWO_PI * W - cum
    # the periodic trapezoid of w is W itself, so the wrap value is exactly zero
    end = W - (cum[-1] + 0.5 * h * (w[-1] + w[0]))
    return LambdaField(lam, W / TWO_PI - w, W / TWO_PI, tangent_modulus(ws), float(end))


def gamma_terms(curve: ClosedCurve, workspace: KernelWorkspace | None = None,
                threads: int = 1) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Return (Gamma1, Gamma2, Gamma3, A) on the grid."""
    ws = _workspace(curve, workspace, threads)
    n, h = ws.n, ws.spacing
    A = tangent_modulus(ws)
    d2x = ws.d2x
    d2xs = [shifted(d2x[:, c]) for c in range(2)]

    def rows(sl):
        xm, dxm, g = ws.xm[:, sl], ws.dxm[:, sl], ws.g[sl]
        behind = dxm[0] * d2xs[0][sl] + dxm[1] * d2xs[1][sl]
        here = dxm[0] * d2x[sl, 0, None] + dxm[1] * d2x[sl, 1, None]
        dxm2 = dxm[0] ** 2 + dxm[1] ** 2
        xdx = xm[0] * dxm[0] + xm[1] * dxm[1]
        return np.stack([
            np.sum(behind * g, axis=1),
            np.sum(dxm2 * xdx * g**3, axis=1),
            np.sum(here * g, axis=1),
        ])

    sums = h * np.concatenate(map_rows(rows, n, ws.threads), axis=1)
    gamma1 = sums[0] / A
    gamma2 = sums[1] / (2.0 * A)
    gamma3 = -h * float(np.sum(sums[2])) / (TWO_PI * A)
    return gamma1, gamma2, gamma3, A


def dlambda_decomposition(curve: ClosedCurve, workspace: KernelWorkspace | None = None,
                          threads: int = 1) -> np.ndarray:
    gamma1, gamma2, gamma3, _ = gamma_terms(curve, workspace, threads)
    return gamma1 + gamma2 + gamma3


def lambda_from_decomposition(curve: ClosedCurve, workspace: KernelWorkspace | None = None,
                              threads: int = 1) -> LambdaField:
    ws = _workspace(curve, workspace, threads)
    gamma1, gamma2, gamma3, A = gamma_terms(curve, ws)
    dlam = gamma1 + gamma2 + gamma3
    lam, end = cumulative_trapezoid(dlam, ws.spacing)
    return LambdaField(lam, dlam, gamma3, A, end)
