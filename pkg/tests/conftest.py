import time

import numpy as np
import pytest

from sqgfront.config import SimConfig
from sqgfront.evolve import run

# lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []
# outcomes of every other test in this session: nodeid -> "passed" | "failed" | "xfailed" | ...
MODULE_OUTCOMES = {}
SESSION_START = time.perf_counter()

LAST_TEST = "test_criterion_12_invariant_suites"


def pytest_collection_modifyitems(items):
    # the suite-wide criterion needs every other outcome, so it runs last
    last = [it for it in items if it.name == LAST_TEST]
    items[:] = [it for it in items if it.name != LAST_TEST] + last


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        outcome = "xfailed" if hasattr(report, "wasxfail") and report.skipped else report.outcome
        if hasattr(report, "wasxfail") and report.passed:
            outcome = "xpassed"
        MODULE_OUTCOMES[report.nodeid] = outcome


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def perturbed_run():
    """perturbed_circle, T = 0.5, n = 256, dt = 5e-4; shared by several checks."""
    cfg = SimConfig(scenario="perturbed_circle", n=256, dt=5e-4, t_end=0.5, record_interval=20)
    t0 = time.perf_counter()
    result = run(cfg)
    result.elapsed = time.perf_counter() - t0
    return result


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def trig_poly(rng, degree, n, components=1):
    """Random real trigonometric polynomial of the given degree sampled on the n-grid."""
    g = -np.pi + 2 * np.pi * np.arange(n) / n
    out = np.zeros((n, components))
    for c in range(components):
        out[:, c] = rng.normal()
        for k in range(1, degree + 1):
            a, b = rng.normal(size=2)
            out[:, c] += a * np.cos(k * g) + b * np.sin(k * g)
    return out[:, 0] if components == 1 else out
