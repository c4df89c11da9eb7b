"""Experiment harness: diagnostics, configs, and the command line."""

from permlab.lab.diagnostics import (
    ConjectureReport,
    UniformityResult,
    epsilon_shift,
    holder_check,
    marginal_uniformity,
    pool_curves,
    second_moment_curve,
    small_time_ratio,
)
from permlab.lab.harness import ExperimentConfig, run

__all__ = [
    "ConjectureReport",
    "ExperimentConfig",
    "UniformityResult",
    "epsilon_shift",
    "holder_check",
    "marginal_uniformity",
    "pool_curves",
    "run",
    "second_moment_curve",
    "small_time_ratio",
]
