"""Contour dynamics for sharp fronts of the surface quasi-geostrophic equation."""

from .config import ConfigError, SimConfig
from .curve import ArcChordViolation, ClosedCurve, Grid, SpeedDegenerate
from .diagnostics import CSV_COLUMNS, DiagnosticsRecord, record
from .evolve import RunResult, StepperState, rhs, run, step
from .experiments import convergence_study, regularization_study, twin_run
from .kernel import kernel_g, nontangential_velocity
from .reparam import enforce_constant_speed, mollify, regularize
from .scenarios import make_scenario
from .tangential import lambda_direct, lambda_from_decomposition

__version__ = "0.1.0"

__all__ = [
    "ArcChordViolation", "CSV_COLUMNS", "ClosedCurve", "ConfigError", "DiagnosticsRecord",
    "Grid", "RunResult", "SimConfig", "SpeedDegenerate", "StepperState", "convergence_study",
    "enforce_constant_speed", "kernel_g", "lambda_direct", "lambda_from_decomposition",
    "make_scenario", "mollify", "nontangential_velocity", "record", "regularization_study",
    "regularize", "rhs", "run", "step", "twin_run",
]
