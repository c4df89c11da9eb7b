"""
Exact squared Wasserstein-2 distances between equal-weight point sets.

Between two uniform measures on m points each, some optimal coupling is a
permutation matrix (an extreme point of the Birkhoff polytope), so W2 reduces
to a linear assignment problem.  That problem is solved exactly with SciPy's
shortest-augmenting-path solver.  When the identity matching is among the
optimal ones it is returned, so ties resolve to the index-preserving matching.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from permlab.core import Partition, Permutation
from permlab.measures import DiscretePermuton, PlanarEnsemble


@dataclass(frozen=True)
class AssignmentResult:
    assignment: Permutation
    cost: float


def _solve(c: np.ndarray) -> tuple[np.ndarray, float]:
    rows, cols = linear_sum_assignment(c)
    best = math.fsum(c[rows, cols])
    diag = math.fsum(np.diagonal(c))
    if diag <= best + 1e-12 * max(1.0, abs(best)):
        return np.arange(c.shape[0]), diag
    return cols, best


def assignment_solve(cost) -> AssignmentResult:
    """Minimise ``sum_i cost[i, pi(i)]`` over permutations ``pi`` (row i goes to column pi(i))."""
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] == 0:
        raise ValueError(f"cost must be a non-empty square matrix, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise ValueError("cost entries must be finite")
    cols, best = _solve(c)
    return AssignmentResult(Permutation(tuple((cols + 1).tolist())), best)


def permutation_cost_matrix(s: Permutation, t: Permutation) -> np.ndarray:
    """``c[i, j] = (i - j)^2 + (s(i) - t(j))^2`` with 1-based labels."""
    idx = np.arange(1, s.n + 1, dtype=np.int64)
    a, b = s.as_array().astype(np.int64), t.as_array().astype(np.int64)
    return (idx[:, None] - idx[None, :]) ** 2 + (a[:, None] - b[None, :]) ** 2


def w2sq_permutations(s: Permutation, t: Permutation) -> float:
    """Squared W2 distance between the empirical permutons of ``s`` and ``t``."""
    if s.n != t.n:
        raise ValueError(f"size mismatch: {s.n} vs {t.n}")
    n = s.n
    return 4.0 * assignment_solve(permutation_cost_matrix(s, t)).cost / n**3


def _matching(p: DiscretePermuton, q: DiscretePermuton) -> tuple[np.ndarray, float]:
    if p.m != q.m:
        raise ValueError(f"point counts differ: {p.m} vs {q.m}")
    cols, best = _solve(cdist(p.points, q.points, "sqeuclidean"))
    return cols, best / p.m


def w2sq_pointsets(p: DiscretePermuton, q: DiscretePermuton) -> float:
    return _matching(p, q)[1]


def _sum_pairwise_max(s: np.ndarray) -> float:
    """``sum_{i,j} max(s_i, s_j)`` in O(m log m): the k-th smallest value is the max of 2k - 1 ordered pairs."""
    srt = np.sort(np.asarray(s, dtype=float))
    return math.fsum(srt * (2.0 * np.arange(1, srt.size + 1) - 1.0))


def identity_distance_sq(p: DiscretePermuton) -> float:
    """Plug-in value of ``4/3 - 2 E max(X + Y, X' + Y')`` for the empirical measure of ``p``."""
    return 4.0 / 3.0 - 2.0 * _sum_pairwise_max(p.x + p.y) / p.m**2


def sum_distance_squared(p: DiscretePermuton) -> float:
    """Plug-in value of ``8/3 - 2 E[max(X+Y, X'+Y') + max(X-Y, X'-Y')]``."""
    total = _sum_pairwise_max(p.x + p.y) + _sum_pairwise_max(p.x - p.y)
    return 8.0 / 3.0 - 2.0 * total / p.m**2


def maxsum_identity_cost(sigma: Permutation) -> int:
    """
    Exact integer minimum of ``sum_i (i - pi(i))^2 + (i - sigma(pi(i)))^2``
    through the rearrangement argument:
    ``4 sum i^2 - sum_{i,j} max(i + sigma(i), j + sigma(j)) - n(n + 1)``.
    """
    n = sigma.n
    s = np.arange(1, n + 1, dtype=np.int64) + sigma.as_array().astype(np.int64)
    srt = np.sort(s)
    pair_max = int(np.sum(srt * (2 * np.arange(1, n + 1, dtype=np.int64) - 1)))
    return 4 * n * (n + 1) * (2 * n + 1) // 6 - pair_max - n * (n + 1)


def closed_form_arch_dist(s: float, t: float) -> float:
    """W2 distance between Archimedean path marginals at times s <= t."""
    if not 0.0 <= s <= t <= 1.0:
        raise ValueError(f"need 0 <= s <= t <= 1, got s={s}, t={t}")
    return math.sqrt(8.0 / 3.0) * math.sin(math.pi * (t - s) / 4.0)


def uniform_interval_dist_sq(a: float, b: float) -> float:
    """Squared W2 distance between Uniform[-a, a] and Uniform[-b, b]."""
    if a < 0 or b < 0:
        raise ValueError("half-widths must be non-negative")
    return (b - a) ** 2 / 3.0


def realize_discrete_path(ms: Sequence[DiscretePermuton], grid: Partition) -> PlanarEnsemble:
    """
    Chain optimal matchings between consecutive slices: path j starts at point
    j of ``ms[0]`` and follows the matching to each later slice, so every
    adjacent pair of slices is coupled optimally.
    """
    if len(ms) != len(grid):
        raise ValueError(f"{len(ms)} slices for {len(grid)} grid times")
    m = ms[0].m
    if any(q.m != m for q in ms):
        raise ValueError("all slices must have the same number of points")
    where = np.arange(m)
    paths = np.empty((m, len(ms), 2))
    paths[:, 0] = ms[0].points
    for i in range(1, len(ms)):
        cols, _ = _matching(ms[i - 1], ms[i])
        where = cols[where]
        paths[:, i] = ms[i].points[where]
    return PlanarEnsemble(grid, paths)


def distance_report(method: str, n_or_m: int, value: float, seed=None) -> str:
    if method not in ("assignment", "formula", "maxsum"):
        raise ValueError(f"unknown method {method!r}")
    return json.dumps({"method": method, "n_or_m": int(n_or_m), "value": float(value), "seed": seed})
