"""Boundary-integral velocity of the contour dynamics equation.

Integrals over the offset eta are discretized by the punctured trapezoidal
rule on grid-aligned offsets eta_j = 2*pi*j/n (j != 0, representative in
(-pi, pi]). The eta = 0 cell contributes nothing: the integrand is bounded
there and its leading part is odd in eta.

Pair tables are stored component-major with shape ``(2, n, n)`` (or ``(n, n)``
for scalars), indexed ``[component, i, j]`` for node gamma_i and offset eta_j,
so every eta-integral is a reduction over the last, contiguous axis. Each
row's reduction is then independent of how rows are split between worker
threads, which keeps results bit-identical for any thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .curve import TWO_PI, ArcChordViolation, ClosedCurve, Grid, derivative

#: minimum chord, relative to the perimeter, before a pair counts as coincident
MIN_CHORD = 1e-12


def row_blocks(n: int, threads: int):
    threads = max(1, int(threads))
    edges = np.linspace(0, n, min(threads, n) + 1).astype(int)
    return [slice(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def map_rows(func, n: int, threads: int = 1):
    """Evaluate ``func(rows)`` on contiguous row blocks, in threads when asked.

    Returns the per-block results in row order.
    """
    blocks = row_blocks(n, threads)
    if len(blocks) == 1:
        return [func(blocks[0])]
    with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
        return list(pool.map(func, blocks))


def shifted(values: np.ndarray) -> np.ndarray:
    """Read-only (n, n) view with ``out[i, j] = values[(i - j) mod n]``.

    Row i is a contiguous window of the reversed, doubled sequence.
    """
    n = values.shape[0]
    rev = values[::-1]
    doubled = np.concatenate([rev, rev])
    windows = np.lib.stride_tricks.sliding_window_view(doubled, n)
    return windows[n - 1::-1] if n > 1 else windows


def _join(parts, axis):
    return parts[0] if len(parts) == 1 else np.concatenate(parts, axis=axis)


@dataclass(frozen=True)
class KernelWorkspace:
    """Pair tables for one curve snapshot.

    ``xm[c, i, j] = x_c(gamma_i) - x_c(gamma_i - eta_j)``, ``dxm`` the same for
    the tangent, and ``g = 1/|xm|``. Column j = 0 is the punctured cell and is
    zero in ``g``.
    """

    curve: ClosedCurve
    dx: np.ndarray
    d2x: np.ndarray
    eta: np.ndarray
    xm: np.ndarray
    dxm: np.ndarray
    g: np.ndarray
    threads: int = 1

    @property
    def n(self) -> int:
        return self.curve.n

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n

    @property
    def f_max(self) -> float:
        return float(np.max(np.abs(self.eta)[None, :] * self.g))


def kernel_g(curve: ClosedCurve, threads: int = 1) -> KernelWorkspace:
    """Build the difference tables and g = 1/|x_-| for every node/offset pair."""
    n = curve.n
    grid = Grid(n)
    x = curve.points
    dx = derivative(x, 1)
    d2x = derivative(x, 2)
    eta = grid.offsets
    perimeter = grid.spacing * np.sum(np.sqrt(np.sum(dx**2, axis=1)))
    if not np.isfinite(perimeter):
        raise ArcChordViolation("curve samples are not finite")

    xs = [shifted(x[:, c]) for c in range(2)]
    dxs = [shifted(dx[:, c]) for c in range(2)]

    def build(rows):
        xm = np.stack([x[rows, c, None] - xs[c][rows] for c in range(2)])
        dxm = np.stack([dx[rows, c, None] - dxs[c][rows] for c in range(2)])
        chord = np.sqrt(xm[0] * xm[0] + xm[1] * xm[1])
        chord[:, 0] = np.inf
        return xm, dxm, chord

    parts = map_rows(build, n, threads)
    xm = _join([p[0] for p in parts], 1)
    dxm = _join([p[1] for p in parts], 1)
    chord = _join([p[2] for p in parts], 0)
    cmin = chord.min()
    if not cmin >= MIN_CHORD * perimeter:
        i, j = np.unravel_index(np.argmin(np.where(np.isnan(chord), -1.0, chord)), chord.shape)
        raise ArcChordViolation(
            f"chord |x(g_{i}) - x(g_{i} - eta_{j})| = {chord[i, j]:.3e} below "
            f"{MIN_CHORD:g} * perimeter ({perimeter:.6g})"
        )
    g = 1.0 / chord
    return KernelWorkspace(curve, dx, d2x, eta, xm, dxm, g, threads)


def nontangential_velocity(curve: ClosedCurve, workspace: KernelWorkspace | None = None,
                           threads: int = 1) -> np.ndarray:
    """Normal-driving part of the contour velocity, shape ``(n, 2)``.

    Approximates  integral_T (dx(g) - dx(g - eta)) / |x(g) - x(g - eta)| deta.
    """
    ws = workspace if workspace is not None else kernel_g(curve, threads)
    h = ws.spacing

    def rows(sl):
        g = ws.g[sl]
        return np.stack([np.sum(ws.dxm[c, sl] * g, axis=1) for c in range(2)], axis=1)

    return h * _join(map_rows(rows, ws.n, ws.threads), 0)


def dgamma_g(curve: ClosedCurve, workspace: KernelWorkspace | None = None,
             threads: int = 1) -> np.ndarray:
    """Table of d/dgamma g(gamma_i, eta_j) in the desingularized form.

    dg = -m1 - m2/2 with
        m1 = (x_- - eta dx(gamma)) . dx_- / |x_-|^3,
        m2 = eta |dx_-|^2 / |x_-|^3.
    Both numerators are O(|eta|^3) near the diagonal. The split relies on a
    constant-speed parametrization; on other curves it differs from the exact
    derivative by a term proportional to the speed variation.
    """
    ws = workspace if workspace is not None else kernel_g(curve, threads)
    eta = ws.eta

    def rows(sl):
        xm, dxm, g = ws.xm[:, sl], ws.dxm[:, sl], ws.g[sl]
        dx = ws.dx[sl]
        g3 = g**3
        r0 = xm[0] - eta[None, :] * dx[:, 0, None]
        r1 = xm[1] - eta[None, :] * dx[:, 1, None]
        m1 = (r0 * dxm[0] + r1 * dxm[1]) * g3
        m2 = eta[None, :] * (dxm[0] ** 2 + dxm[1] ** 2) * g3
        return -m1 - 0.5 * m2

    return _join(map_rows(rows, ws.n, ws.threads), 0)


def arc_chord_table(workspace: KernelWorkspace) -> np.ndarray:
    """F(gamma_i, eta_j) = |eta_j| / |x_-|, zero in the punctured column."""
    return np.abs(workspace.eta)[None, :] * workspace.g
