"""
Discrete Dirichlet energy of paths evaluated on explicit partitions.

For a partition ``0 = t_0 < ... < t_k = 1`` the energy is
``sum_i d(gamma(t_{i-1}), gamma(t_i))^2 / (t_i - t_{i-1})``.  Adding partition
points can only increase it, so a fine partition gives a certified lower
bound for the supremum over all partitions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from permlab.core import Partition, TrajectoryEnsemble


@dataclass(frozen=True)
class EnergyReport:
    partition: Partition
    per_interval: tuple[float, ...]
    total: float

    def __post_init__(self):
        if len(self.per_interval) != len(self.partition) - 1:
            raise ValueError("one term per partition interval is required")
        if any(v < 0 for v in self.per_interval):
            raise ValueError("energy terms must be non-negative")

    @classmethod
    def from_terms(cls, pi: Partition, terms) -> EnergyReport:
        terms = tuple(float(v) for v in terms)
        return cls(pi, terms, math.fsum(terms))

    def restrict(self, a: float, b: float) -> float:
        """Energy over [a, b] using the partition points inside it; a and b must be partition times."""
        times = self.partition.times
        ia, ib = np.searchsorted(times, [a, b])
        if ia >= len(times) or ib >= len(times) or times[ia] != a or times[ib] != b or a > b:
            raise ValueError(f"[{a}, {b}] is not spanned by partition times")
        return math.fsum(self.per_interval[ia:ib])

    def to_dict(self) -> dict:
        return {"times": self.partition.times.tolist(), "per_interval": list(self.per_interval), "total": self.total}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _values_on(e, pi: Partition) -> np.ndarray:
    vals = e.at(pi.times)
    return vals if vals.ndim == 3 else vals[:, :, None]


def ensemble_energy(e, pi: Partition) -> EnergyReport:
    """
    Ensemble-averaged energy of a TrajectoryEnsemble (or a planar ensemble,
    with squared Euclidean increments) on the partition ``pi``.
    """
    if len(pi) < 2:
        raise ValueError("a partition needs at least two times")
    v = _values_on(e, pi)
    sq = np.sum(np.diff(v, axis=1) ** 2, axis=2)
    return EnergyReport.from_terms(pi, sq.mean(axis=0) / pi.gaps)


def permuton_path_energy(ms: Sequence, pi: Partition, dist: Callable) -> EnergyReport:
    """Energy of the sequence ``ms`` placed at the times of ``pi`` under the squared distance ``dist``."""
    if len(ms) != len(pi):
        raise ValueError(f"{len(ms)} slices for {len(pi)} partition times")
    gaps = pi.gaps
    return EnergyReport.from_terms(pi, [dist(ms[i - 1], ms[i]) / gaps[i - 1] for i in range(1, len(ms))])


def refine(pi: Partition, extra_times) -> Partition:
    extra = np.asarray(list(extra_times), dtype=float)
    if np.any((extra < 0) | (extra > 1)):
        raise ValueError("refinement times must lie in [0, 1]")
    return Partition(np.union1d(pi.times, extra))


def sigma_energy_bound(e: TrajectoryEnsemble, pi: Partition) -> tuple[float, float]:
    """
    Return ``(energy, sigma_energy)`` where ``sigma(t)`` is the empirical
    standard deviation of the ensemble at ``t``.  Means are removed before
    ``sigma`` is formed; the energy is the plain ensemble energy.
    """
    if len(pi) < 2:
        raise ValueError("a partition needs at least two times")
    energy = ensemble_energy(e, pi).total
    v = e.at(pi.times)
    sigma = np.sqrt(np.mean((v - v.mean(axis=0)) ** 2, axis=0))
    sigma_energy = math.fsum(np.diff(sigma) ** 2 / pi.gaps)
    return energy, sigma_energy
