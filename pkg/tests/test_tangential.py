import numpy as np
import pytest

from sqgfront.curve import TWO_PI, antiderivative, circle, derivative
from sqgfront.kernel import kernel_g, nontangential_velocity
from sqgfront.scenarios import _project, ellipse, radial_graph
from sqgfront.tangential import (
    cumulative_trapezoid,
    dlambda_decomposition,
    gamma_terms,
    lambda_direct,
    lambda_from_decomposition,
)

ROUTES = [lambda_direct, lambda_from_decomposition]
ROUNDOFF_FLOOR = 1e-10


def perturbed(n, amp=0.1):
    return _project(radial_graph(n, lambda t: 1 + amp * np.cos(3 * t)))


def observed_orders(errs):
    e = np.asarray(errs)
    return np.log2(e[:-1] / e[1:])


def test_cumulative_trapezoid_linear():
    n = 16
    h = TWO_PI / n
    cum, end = cumulative_trapezoid(np.ones(n), h)
    assert cum[0] == 0.0
    assert np.allclose(cum, h * np.arange(n))
    assert np.isclose(end, TWO_PI)


@pytest.mark.parametrize("route", ROUTES)
def test_circle_lambda_vanishes(route):
    lam = route(circle(256))
    assert lam.sup <= 1e-6
    assert lam.dsup <= 1e-6
    assert lam.A > 0


@pytest.mark.parametrize("route", ROUTES)
def test_lambda_endpoints(route):
    lam = route(ellipse(256))
    assert lam.lam[0] == 0.0
    assert abs(lam.lambda_end) <= 1e-8 * lam.sup + 1e-12


def test_dlambda_mean_zero():
    c = ellipse(256)
    assert abs(TWO_PI / c.n * np.sum(dlambda_decomposition(c))) <= 1e-10


def test_gamma3_constant_matches_field():
    c = perturbed(128)
    g1, g2, g3, A = gamma_terms(c)
    lam = lambda_from_decomposition(c)
    assert lam.gamma3 == g3 and lam.A == A
    assert np.allclose(lam.dlam, g1 + g2 + g3, rtol=0, atol=1e-15)


@pytest.mark.parametrize("make,tol", [(ellipse, 5e-4), (perturbed, 1e-3)])
def test_direct_vs_decomposition(make, tol):
    c = make(512)
    ws = kernel_g(c)
    a, b = lambda_direct(c, ws), lambda_from_decomposition(c, ws)
    assert np.max(np.abs(a.lam - b.lam)) <= tol


def test_spectral_derivative_of_direct_matches_decomposition():
    errs = []
    for n in (128, 256, 512):
        c = ellipse(n)
        ws = kernel_g(c)
        errs.append(np.max(np.abs(derivative(lambda_direct(c, ws).lam, 1)
                                  - dlambda_decomposition(c, ws))))
    assert errs[-1] <= 5e-4
    assert np.all(observed_orders(errs) >= 1.5)


def test_three_way_consistency():
    # direct <-> integrated decomposition <-> spectral antiderivative of the decomposition
    d_direct, d_spectral = [], []
    for n in (128, 256, 512):
        c = perturbed(n)
        ws = kernel_g(c)
        a, b = lambda_direct(c, ws), lambda_from_decomposition(c, ws)
        F, mean = antiderivative(b.dlam)
        assert abs(mean) <= 1e-12
        d_direct.append(np.max(np.abs(a.lam - b.lam)))
        d_spectral.append(np.max(np.abs((F - F[0]) - b.lam)))
    assert max(d_direct) <= 1e-3
    # both formulas share every discrete identity, so they agree to roundoff;
    # an order is only meaningful above the roundoff floor
    if min(d_direct) > ROUNDOFF_FLOOR:
        assert np.all(observed_orders(d_direct) >= 1.5)
    assert np.all(observed_orders(d_spectral) >= 1.5)


@pytest.mark.parametrize("route", ROUTES)
def test_rotation_invariance(route):
    c = perturbed(128)
    th = -1.1
    Q = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    a = route(c).lam
    b = route(c.with_points(c.points @ Q.T)).lam
    assert np.max(np.abs(a - b)) <= 1e-10


@pytest.mark.parametrize("route", ROUTES)
def test_dilation_scaling(route):
    # lambda multiplies dx, which scales with the curve while the velocity does not
    c = perturbed(128)
    a = route(c).lam
    b = route(c.with_points(2.5 * c.points)).lam
    assert np.max(np.abs(2.5 * b - a)) <= 1e-10


def test_lambda_keeps_speed_constant():
    c = ellipse(512)
    ws = kernel_g(c)
    u = nontangential_velocity(c, ws)
    lam = lambda_from_decomposition(c, ws).lam

    def spread_rate(vel):
        return np.ptp(2 * np.sum(ws.dx * derivative(vel, 1), axis=1))

    assert spread_rate(u + lam[:, None] * ws.dx) <= 1e-3 * spread_rate(u)


def test_threads_bit_identical():
    c = perturbed(96)
    for route in ROUTES:
        a = route(c, kernel_g(c, 1))
        b = route(c, kernel_g(c, 4))
        assert np.array_equal(a.lam, b.lam) and np.array_equal(a.dlam, b.dlam)
