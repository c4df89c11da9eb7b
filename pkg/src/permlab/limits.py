"""
From sampled continuous paths to permutation processes, and back.

``discretize`` ranks n sampled paths at the times ``t / n``; particle i is the
path that is i-th smallest at time 0.  ``deviation_report`` measures how far
the rescaled particle trajectories stray from the paths they were built from.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from permlab.core import Partition, PermutationProcess, TrajectoryEnsemble


class DegenerateInputError(ValueError):
    """Ties among path values survived the jitter budget."""


@dataclass(frozen=True)
class DeviationReport:
    n: int
    sup_deviation: float
    bound: float
    hold: bool
    seed: int | None = None

    @property
    def threshold(self) -> float:
        return 4.0 * self.n ** -0.25

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "sup_deviation": self.sup_deviation, "bound": self.bound, "hold": self.hold, "seed": self.seed}
        )


def discretize(source: TrajectoryEnsemble, seed, max_jitter_rounds: int = 8) -> PermutationProcess:
    """
    Permutation process of ranks: at step t the particle that started i-th
    smallest sits at the rank of its path among all path values at ``t / n``.
    Tied values are separated by seeded jitter of a few ulps before ranking.
    """
    n = source.m
    if source.grid != Partition.uniform(n):
        raise ValueError(f"source must live on the uniform grid with n = m = {n} intervals")
    vals = np.array(source.paths.T)  # (n + 1, n): one row per time
    rng = np.random.default_rng(seed)
    for _ in range(max_jitter_rounds + 1):
        order = np.argsort(vals, axis=1)
        srt = np.take_along_axis(vals, order, axis=1)
        if not np.any(srt[:, 1:] == srt[:, :-1]):
            break
        scale = np.spacing(np.maximum(np.abs(vals), 1.0)) * 4
        vals = vals + rng.uniform(-1.0, 1.0, size=vals.shape) * scale
    else:
        raise DegenerateInputError("path values still tie after jitter")
    start = order[0]  # start[i] = source path of particle i + 1
    particle_of = np.empty(n, dtype=np.int64)
    particle_of[start] = np.arange(1, n + 1)
    # row t lists particles by increasing path value, i.e. by rank
    return PermutationProcess(particle_of[order], source_index=start)


def deviation_report(proc: PermutationProcess, source: TrajectoryEnsemble, seed=None) -> DeviationReport:
    """Largest gap over particles and grid times between ``2 rank / n - 1`` and the source path value."""
    n = proc.n
    if source.m != n or proc.t_max + 1 != len(source.grid):
        raise ValueError("process and source shapes do not match")
    idx = proc.source_index if proc.source_index is not None else np.arange(n)
    if proc.t_max == 0:
        raise ValueError("process has no time steps")
    traj = 2.0 * proc.positions().T / n - 1.0
    sup = float(np.max(np.abs(traj - source.paths[idx])))
    bound = 2.0 * n**-0.25 + 2.0 / n
    return DeviationReport(n, sup, bound, sup <= 4.0 * n**-0.25, seed)


def linearize(e: TrajectoryEnsemble, n: int) -> TrajectoryEnsemble:
    """Sample every path at ``i / n`` and interpolate linearly in between."""
    if n < 1:
        raise ValueError("n must be positive")
    grid = Partition.uniform(n)
    return TrajectoryEnsemble(grid, e.at(grid.times))
