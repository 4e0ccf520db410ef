"""Closed curves sampled on the periodic grid and the spectral toolkit built on them.

Every field lives on the uniform grid ``gamma_i = -pi + 2*pi*i/n`` of the torus
[-pi, pi). Fourier coefficients follow the convention

    fhat_k = (1/2pi) * integral_T f(gamma) exp(-i k gamma) dgamma,

so ``f(gamma) = sum_k fhat_k exp(i k gamma)`` and Parseval reads
``||f||_L2^2 = 2pi * sum_k |fhat_k|^2``.

Fields are plain numpy arrays with the grid along axis 0: shape ``(n,)`` for
scalars and ``(n, 2)`` for planar curves. Functions also accept a
:class:`ClosedCurve` wherever an ``(n, 2)`` array is expected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

TWO_PI = 2.0 * np.pi


class ArcChordViolation(ValueError):
    """Two distinct nodes (nearly) coincide, so the arc-chord quantity is unbounded."""


class SpeedDegenerate(ValueError):
    """The parametrization speed |dx/dgamma| vanishes somewhere on the curve."""


@dataclass(frozen=True)
class Grid:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8 or self.n % 2:
            raise ValueError(f"grid size must be an even integer >= 8, got {self.n!r}")

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n

    @property
    def nodes(self) -> np.ndarray:
        return -np.pi + self.spacing * np.arange(self.n)

    @property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers in numpy FFT order (the Nyquist mode appears as -n/2)."""
        return np.fft.fftfreq(self.n, 1.0 / self.n)

    @property
    def offsets(self) -> np.ndarray:
        """Grid offsets eta_j = j*h mapped to the representative in (-pi, pi]."""
        j = np.arange(self.n)
        j = np.where(j > self.n // 2, j - self.n, j)
        return self.spacing * j


@dataclass(frozen=True)
class ClosedCurve:
    """Samples x(gamma_i) of a closed planar curve; periodicity is implicit."""

    points: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"curve points must have shape (n, 2), got {pts.shape}")
        Grid(pts.shape[0])
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def grid(self) -> Grid:
        return Grid(self.n)

    def with_points(self, points, time=None) -> "ClosedCurve":
        return ClosedCurve(points, self.time if time is None else time)

    @classmethod
    def from_function(cls, func, n: int, time: float = 0.0) -> "ClosedCurve":
        """Sample ``func(gamma) -> (x1, x2)`` on the n-point grid."""
        x1, x2 = func(Grid(n).nodes)
        return cls(np.column_stack([x1, x2]), time)


Field = Union[np.ndarray, ClosedCurve]


def _values(f: Field) -> np.ndarray:
    if isinstance(f, ClosedCurve):
        return f.points
    return np.asarray(f, dtype=float)


def _shape_like(mult: np.ndarray, arr: np.ndarray) -> np.ndarray:
    return mult.reshape((-1,) + (1,) * (arr.ndim - 1))


@dataclass(frozen=True)
class SpectralCoeffs:
    """Fourier coefficients of a periodic field, stored in numpy FFT order."""

    coeffs: np.ndarray
    wavenumbers: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    def mode(self, k: int):
        """Coefficient of wavenumber ``k`` for -n/2 <= k < n/2."""
        n = self.n
        if not -n // 2 <= k < n // 2:
            raise IndexError(f"wavenumber {k} outside [-{n // 2}, {n // 2})")
        return self.coeffs[k % n]

    def centered(self) -> tuple[np.ndarray, np.ndarray]:
        """Wavenumbers -n/2..n/2-1 and the matching coefficients."""
        return np.fft.fftshift(self.wavenumbers), np.fft.fftshift(self.coeffs, axes=0)


def _phase(n: int) -> np.ndarray:
    # the grid starts at -pi, so the DFT picks up a factor exp(i k pi) = (-1)^k
    k = np.fft.fftfreq(n, 1.0 / n).astype(int)
    return np.where(k % 2 == 0, 1.0, -1.0)


def to_spectral(f: Field) -> SpectralCoeffs:
    arr = _values(f)
    n = arr.shape[0]
    coeffs = np.fft.fft(arr, axis=0) / n
    coeffs *= _shape_like(_phase(n), coeffs)
    return SpectralCoeffs(coeffs, Grid(n).wavenumbers)


def from_spectral(spec: SpectralCoeffs, real: bool = True) -> np.ndarray:
    n = spec.n
    arr = np.fft.ifft(spec.coeffs * _shape_like(_phase(n), spec.coeffs), axis=0) * n
    return arr.real if real else arr


def _apply_multiplier(f: Field, mult: np.ndarray) -> np.ndarray:
    arr = _values(f)
    fh = np.fft.fft(arr, axis=0)
    return np.fft.ifft(fh * _shape_like(mult, fh), axis=0).real


def derivative(f: Field, order: int = 1) -> np.ndarray:
    """Spectral derivative of the given order (1, 2 or 3)."""
    if order not in (1, 2, 3):
        raise ValueError(f"derivative order must be 1, 2 or 3, got {order}")
    arr = _values(f)
    n = arr.shape[0]
    k = Grid(n).wavenumbers
    mult = (1j * k) ** order
    if order % 2:
        mult[n // 2] = 0.0
    return _apply_multiplier(arr, mult)


def fractional_laplacian(f: Field, s: float) -> np.ndarray:
    """Apply Lambda^s = (-Delta)^(s/2), the multiplier |k|^s (mean and Nyquist removed)."""
    if s < 0:
        raise ValueError(f"fractional order must be >= 0, got {s}")
    arr = _values(f)
    n = arr.shape[0]
    mult = np.abs(Grid(n).wavenumbers) ** s
    mult[0] = 0.0
    mult[n // 2] = 0.0
    return _apply_multiplier(arr, mult)


def antiderivative(f: np.ndarray) -> tuple[np.ndarray, float]:
    """Split a scalar field into mean and spectral antiderivative of the remainder.

    Returns ``(F, mean)`` where ``F`` is the periodic, mean-zero antiderivative of
    ``f - mean`` sampled on the grid. The Nyquist mode is dropped.
    """
    arr = _values(f)
    n = arr.shape[0]
    k = Grid(n).wavenumbers
    fh = np.fft.fft(arr, axis=0)
    mean = fh[0].real / n
    mult = np.zeros(n, dtype=complex)
    nz = k != 0
    mult[nz] = 1.0 / (1j * k[nz])
    mult[n // 2] = 0.0
    return np.fft.ifft(fh * mult).real, mean


def sobolev_norm(f: Field, r: float, homogeneous: bool = False) -> float:
    """H^r (or homogeneous H^r) norm from the Fourier multiplier form."""
    if r < 0:
        raise ValueError(f"Sobolev exponent must be >= 0, got {r}")
    spec = to_spectral(f)
    k = spec.wavenumbers
    if homogeneous:
        weight = np.abs(k) ** (2 * r)
        weight[0] = 0.0
    else:
        weight = (1.0 + k**2) ** r
    power = np.abs(spec.coeffs) ** 2
    if power.ndim > 1:
        power = power.sum(axis=1)
    return float(np.sqrt(TWO_PI * np.sum(weight * power)))


def l2_norm(f: Field) -> float:
    """Discrete L2 norm sqrt(h * sum |f_i|^2)."""
    arr = _values(f)
    n = arr.shape[0]
    return float(np.sqrt(TWO_PI / n * np.sum(arr**2)))


def interp_at(f: Field, points) -> np.ndarray:
    """Evaluate the trigonometric interpolant of ``f`` at arbitrary parameter values.

    The Nyquist coefficient is split evenly between +n/2 and -n/2 so the
    interpolant of a real field stays real. Exact at grid nodes.
    """
    arr = _values(f)
    n = arr.shape[0]
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    spec = to_spectral(arr)
    return eval_series(spec.coeffs, spec.wavenumbers, pts, real=np.isrealobj(arr))


#: rows of the dense basis matrix evaluated at a time
EVAL_CHUNK = 512


def eval_series(coeffs: np.ndarray, k: np.ndarray, points: np.ndarray, real: bool = True) -> np.ndarray:
    """Sum coeffs_k exp(i k p) at each point, with the Nyquist term read as a cosine."""
    n = coeffs.shape[0]
    out = np.empty((points.shape[0],) + coeffs.shape[1:], dtype=complex)
    sub = "mk,k->m" if coeffs.ndim == 1 else "mk,kc->mc"
    for start in range(0, points.shape[0], EVAL_CHUNK):
        p = points[start:start + EVAL_CHUNK]
        basis = np.exp(1j * np.multiply.outer(p, k))
        # exp(-i n/2 p) -> cos(n p / 2) for the unmatched Nyquist mode
        basis[:, n // 2] = np.cos(0.5 * n * p)
        out[start:start + EVAL_CHUNK] = np.einsum(sub, basis, coeffs)
    return out.real if real else out


def periodic_distance(a, b):
    d = np.abs(np.asarray(a) - np.asarray(b)) % TWO_PI
    return np.minimum(d, TWO_PI - d)


def holder_seminorm(f: Field, alpha: float) -> float:
    """Pairwise estimate of the C^alpha seminorm on the grid.

    Max over node pairs of |f_i - f_j| / d(gamma_i, gamma_j)^alpha with the
    periodic distance d. This is a lower bound for the continuum seminorm that
    converges from below as the grid is refined.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"Holder exponent must lie in (0, 1), got {alpha}")
    arr = _values(f)
    n = arr.shape[0]
    h = TWO_PI / n
    best = 0.0
    for j in range(1, n // 2 + 1):
        diff = arr - np.roll(arr, j, axis=0)
        mag = np.sqrt(np.sum(diff**2, axis=1)) if diff.ndim > 1 else np.abs(diff)
        best = max(best, float(mag.max()) / (j * h) ** alpha)
    return best


def speed(curve: Field) -> np.ndarray:
    dx = derivative(curve, 1)
    return np.sqrt(np.sum(dx**2, axis=1))


def circle(n: int, radius: float = 1.0, center=(0.0, 0.0)) -> ClosedCurve:
    g = Grid(n).nodes
    return ClosedCurve(np.column_stack([center[0] + radius * np.cos(g), center[1] + radius * np.sin(g)]))


def ellipse(n: int, a: float = 1.2, b: float = 0.8) -> ClosedCurve:
    g = Grid(n).nodes
    return ClosedCurve(np.column_stack([a * np.cos(g), b * np.sin(g)]))
