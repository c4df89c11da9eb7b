"""
Finite-n diagnostics for ensembles of trajectories: the second-moment curve,
a Hölder-type modulus check, marginal uniformity and the epsilon-shift.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from permlab._kernels import holder_pairs
from permlab.core import TrajectoryEnsemble

HOLDER_SCALE = math.sqrt(8.0)


def second_moment_target(t) -> np.ndarray:
    """``(2/3)(1 - cos(pi t))``, the increment second moment of the Archimedean process."""
    return (2.0 / 3.0) * (1.0 - np.cos(np.pi * np.asarray(t, dtype=float)))


@dataclass(frozen=True)
class ConjectureReport:
    t_values: tuple[float, ...]
    empirical: tuple[float, ...]
    target: tuple[float, ...]
    sup_gap: float

    def __post_init__(self):
        if not len(self.t_values) == len(self.empirical) == len(self.target):
            raise ValueError("curve sequences must have equal length")

    def to_dict(self) -> dict:
        return {
            "t_values": list(self.t_values),
            "empirical": list(self.empirical),
            "target": list(self.target),
            "sup_gap": self.sup_gap,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def second_moment_curve(e: TrajectoryEnsemble) -> ConjectureReport:
    t = e.grid.times
    emp = np.mean((e.paths - e.paths[:, :1]) ** 2, axis=0)
    tgt = second_moment_target(t)
    return ConjectureReport(tuple(t.tolist()), tuple(emp.tolist()), tuple(tgt.tolist()), float(np.max(np.abs(emp - tgt))))


def pool_curves(reports: list[ConjectureReport]) -> ConjectureReport:
    """Average several curves on a common grid (e.g. one per sampled network)."""
    if not reports:
        raise ValueError("nothing to pool")
    t = np.asarray(reports[0].t_values)
    if any(not np.array_equal(t, r.t_values) for r in reports):
        raise ValueError("curves must share a grid")
    emp = np.mean([r.empirical for r in reports], axis=0)
    tgt = second_moment_target(t)
    return ConjectureReport(tuple(t.tolist()), tuple(emp.tolist()), tuple(tgt.tolist()), float(np.max(np.abs(emp - tgt))))


def _knots(times: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Grid indices where a piecewise-linear path changes slope, plus both endpoints."""
    slope = np.diff(v) / np.diff(times)
    inner = np.nonzero(slope[1:] != slope[:-1])[0] + 1
    return np.concatenate([[0], inner, [times.size - 1]]).astype(np.int64)


def holder_check(e: TrajectoryEnsemble, delta: float) -> tuple[int, int]:
    """
    Count pairs with ``|T(t) - T(s)| > sqrt(8) |t - s|^(1/2) + delta``.

    Along a linear piece the excess is convex in each time, so a violating pair
    exists only if one exists among slope-change points.  Those knot pairs are
    what gets counted, per path; the second return value is how many were examined.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    times = np.ascontiguousarray(e.grid.times)
    violations = pairs = 0
    for v in e.paths:
        v = np.ascontiguousarray(v)
        bad, n_pairs = holder_pairs(times, v, _knots(times, v), HOLDER_SCALE, float(delta))
        violations += int(bad)
        pairs += int(n_pairs)
    return violations, pairs


@dataclass(frozen=True)
class UniformityResult:
    statistic: float
    pvalue: float


def marginal_uniformity(e: TrajectoryEnsemble, t: float) -> UniformityResult:
    """One-sample KS test of the values at time ``t`` against Uniform[-1, 1]."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"time must lie in [0, 1], got {t}")
    res = stats.kstest(e.at(t), stats.uniform(loc=-1.0, scale=2.0).cdf)
    return UniformityResult(float(res.statistic), float(res.pvalue))


def epsilon_shift(e: TrajectoryEnsemble, eps: float) -> TrajectoryEnsemble:
    """
    ``(-1)^floor(eps + t) X((eps + t) mod 1)`` evaluated on the ensemble's own grid.
    Continuous when every path ends at minus its starting value.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    s = eps + e.grid.times
    sign = np.where(np.floor(s) % 2 == 0, 1.0, -1.0)
    return TrajectoryEnsemble(e.grid, e.at(np.mod(s, 1.0)) * sign)


def small_time_ratio(e: TrajectoryEnsemble, t_max: float = 0.1) -> list[tuple[float, float]]:
    """``avg (X(t) - X(0))^2 / t^2`` over grid times in (0, t_max]."""
    t = e.grid.times
    keep = (t > 0) & (t <= t_max)
    emp = np.mean((e.paths[:, keep] - e.paths[:, :1]) ** 2, axis=0)
    return list(zip(t[keep].tolist(), (emp / t[keep] ** 2).tolist()))
