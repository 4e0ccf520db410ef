import math

import numpy as np
import pytest

from sqgfront.config import SimConfig
from sqgfront.curve import ArcChordViolation, sobolev_norm
from sqgfront.diagnostics import arc_chord, record, speed_variation
from sqgfront.evolve import ARC_CHORD_BLOWUP, rk4, run
from sqgfront.experiments import (
    SCENARIOS,
    convergence_study,
    filament_prediction,
    fit_growth,
    make_scenario,
    normal_perturbation,
    regularization_study,
    twin_distance,
    twin_run,
)


# ------------------------------------------------------------------ scenarios

def test_unknown_scenario():
    with pytest.raises(ValueError, match="unknown scenario"):
        make_scenario("square")


def test_bad_parameter_rejected():
    with pytest.raises((ValueError, TypeError)):
        make_scenario("circle", {"radius": 2.0})
    with pytest.raises(ArcChordViolation):
        make_scenario("rough_h2s", {"c": 50.0}, n=64)


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenarios_start_at_constant_speed(name):
    # at its default n; coarser rough data keeps a ~1e-8 aliasing floor after projection
    c = make_scenario(name)
    assert speed_variation(c) <= 1e-8
    assert math.isfinite(arc_chord(c))


def test_rough_reproducible():
    a = make_scenario("rough_h2s", {"seed": 7}, n=256)
    b = make_scenario("rough_h2s", {"seed": 7}, n=256)
    c = make_scenario("rough_h2s", {"seed": 8}, n=256)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)


def test_rough_h2s_marginal():
    a = record(make_scenario("rough_h2s", {"seed": 7}, n=256)).h2s_norm
    b = record(make_scenario("rough_h2s", {"seed": 7}, n=512)).h2s_norm
    assert np.isfinite(a) and np.isfinite(b) and b / a <= 1.5


def test_filament_prediction():
    c = make_scenario("filament_probe", {"d": 0.05}, n=1024)
    assert abs(arc_chord(c) / filament_prediction(0.05) - 1) <= 0.1


def test_filament_neck_widens():
    # the symmetric two-lobe patch merges: the neck opens and F_max falls
    res = run(SimConfig(scenario="filament_probe", params={"d": 0.3}, n=256, dt=0.0,
                        t_end=0.02, record_interval=5))
    assert res.completed
    assert res.records[-1].F_max < res.records[0].F_max
    assert all(r.all_finite() for r in res.records)


@pytest.mark.xfail(strict=True, reason="the neck widens under the flow; no arc-chord blow-up occurs")
def test_filament_blows_up():
    res = run(SimConfig(scenario="filament_probe", params={"d": 0.2}, n=256, dt=0.0,
                        t_end=0.05, record_interval=10))
    assert res.reason == ARC_CHORD_BLOWUP


# ------------------------------------------------------------------- twin run

def test_fit_growth_exact_exponential():
    t = np.linspace(0, 1, 11)
    C, b, res = fit_growth(t, 3.0 * np.exp(0.7 * t))
    assert C == pytest.approx(0.7, rel=1e-12) and b == pytest.approx(math.log(3.0), rel=1e-12)
    assert res <= 1e-12
    assert fit_growth(t, np.zeros(11))[0] == 0.0


def test_normal_perturbation():
    c = make_scenario("perturbed_circle", n=128)
    assert normal_perturbation(c, 0.0) is c
    y = normal_perturbation(c, 1e-6)
    d = twin_distance(c, y)
    assert 0 < d[2] < 1e-4
    assert speed_variation(y) <= 1e-8


def test_twin_distance_symmetric():
    c = make_scenario("perturbed_circle", n=64)
    y = normal_perturbation(c, 1e-4)
    x1, y1 = rk4(c, 2e-3), rk4(y, 2e-3)
    assert twin_distance(x1, y1) == twin_distance(y1, x1)
    assert twin_distance(x1, x1) == (0.0, 0.0, 0.0)


def test_twin_zero_delta():
    cfg = SimConfig(scenario="perturbed_circle", n=64, dt=2e-3, t_end=0.02, record_interval=2)
    rep = twin_run(cfg, 0.0)
    assert rep.reason == "completed"
    assert max(rep.d_total) == 0.0
    assert len(rep.times) == 6 and rep.times[-1] == pytest.approx(0.02)


def test_twin_rejects_negative_delta():
    with pytest.raises(ValueError):
        twin_run(SimConfig(scenario="circle", n=32), -1.0)


def test_twin_small_run_linear_response():
    cfg = SimConfig(scenario="perturbed_circle", n=64, dt=2e-3, t_end=0.1, record_interval=5)
    a = twin_run(cfg, 1e-6)
    b = twin_run(cfg, 5e-7)
    assert a.reason == b.reason == "completed"
    assert np.all(np.isfinite(a.d_total)) and a.d_total[0] > 0
    assert abs(a.d_total[-1] / b.d_total[-1] - 2) <= 0.5
    assert a.fit_residual <= 0.2


# ---------------------------------------------------------------- convergence

@pytest.fixture(scope="module")
def perturbed_convergence():
    return convergence_study("perturbed_circle", [32, 64, 128], [2e-3, 1e-3, 5e-4], t_end=0.1)


def test_spatial_order(perturbed_convergence):
    assert np.all(np.array(perturbed_convergence.spatial_orders) >= 2.0)


def test_temporal_order(perturbed_convergence):
    rep = perturbed_convergence
    assert np.all(np.array(rep.temporal_orders) >= 3.5)
    assert np.all(np.array(rep.temporal_ratios) >= 12)


def test_report_serializable(perturbed_convergence):
    d = perturbed_convergence.as_dict()
    assert d["spatial_reference_n"] == 512 and d["temporal_reference_dt"] == 1.25e-4


def test_circle_convergence_is_pure_slide():
    # the shape is steady to roundoff; nodes only slide tangentially at the
    # discrete rotation speed, whose quadrature error is second order in h
    rep = convergence_study("circle", [32, 64], [2e-3, 1e-3], t_end=0.05)
    assert max(rep.temporal_errors) <= 1e-10
    assert rep.spatial_orders[0] >= 1.8
    res = run(SimConfig(scenario="circle", n=32, dt=1e-3, t_end=0.05, filter_level=0.0))
    r = np.sqrt(np.sum(res.final.points**2, axis=1))
    assert np.max(np.abs(r - 1)) <= 1e-13


# ------------------------------------------------------------- regularization

def test_regularization_zero_eps_is_identity():
    c = make_scenario("rough_h2s", n=256)
    assert regularization_study(c, [0.0]).errors[0] <= 1e-13


def test_regularization_requires_descending():
    with pytest.raises(ValueError):
        regularization_study(make_scenario("circle", n=32), [1e-3, 1e-2])


@pytest.fixture(scope="module")
def rough_regularization():
    c = make_scenario("rough_h2s", {"seed": 7}, n=512)
    return regularization_study(c, [0.1 / 2**j for j in range(8)], require_monotone=True)


def test_rough_regularization_monotone(rough_regularization):
    assert rough_regularization.monotone


def test_rough_regularization_decay_below_tenth(rough_regularization):
    # eps <= 0.05: the mollifier acts on resolved modes and each halving gains >= 25%
    assert max(rough_regularization.ratios[1:]) <= 0.75


@pytest.mark.xfail(strict=True, reason="marginal H^(2+s) tail: the error decays only like "
                                       "sqrt(log(kmax eps)) while eps*kmax >> 1")
def test_rough_regularization_decay_full_range(rough_regularization):
    assert max(rough_regularization.ratios) <= 0.75


def test_smooth_regularization_quadratic():
    # 1 - exp(-(eps k)^2 / 2) <= (eps k)^2 / 2 trades two derivatives for eps^2
    c = make_scenario("ellipse", n=128)
    eps = np.array([1e-3, 5e-4, 1e-4, 1e-5])
    err = np.array(regularization_study(c, eps, require_monotone=True).errors)
    assert np.all(err <= 0.5 * eps**2 * sobolev_norm(c.points, 4.25))
    scaled = err / eps**2
    assert np.ptp(scaled) <= 0.01 * scaled.mean()
    assert err[-1] <= 1e-8


@pytest.mark.xfail(strict=True, reason="every closed curve has a k = 1 mode, damped by eps^2/2 ~ 5e-7")
def test_smooth_regularization_literal():
    c = make_scenario("ellipse", n=128)
    assert max(regularization_study(c, [1e-3, 5e-4]).errors) <= 1e-8
