"""
Sorting networks and other permutation processes built from adjacent swaps.

Uniform random sorting networks come from a uniform staircase tableau (hook
walks) pushed through the Edelman-Greene sliding map.  The reading convention
(``EG_READING``) was pinned by checking the sampler's support against the
exhaustive enumeration for n <= 5.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from math import factorial

import numpy as np

from permlab._kernels import edelman_greene_word, rsn_words, staircase_tableau, word_snapshots
from permlab.core import PermutationProcess, SwapWord

# record the column (1-based) of the maximal corner at each step
EG_READING = "column"
_TRANSPOSE = EG_READING == "row"


class NotANetworkError(ValueError):
    """Raised when a point cloud has a pair that never changes x-order."""

    def __init__(self, pair):
        super().__init__(f"points {pair[0]} and {pair[1]} never cross; target is not reverse-compatible")
        self.pair = pair


def _seed_int(seed) -> int:
    return int(np.random.default_rng(seed).integers(0, 2**31 - 1))


@dataclass(frozen=True, eq=False)
class StaircaseTableau:
    """Standard filling of the staircase shape (n-1, ..., 1); ``entries`` is 0 outside the shape."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        n = self.n
        e = np.asarray(self.entries)
        if e.shape != (n - 1, n - 1):
            raise ValueError("entries must be an (n-1) x (n-1) array")
        inside = np.add.outer(np.arange(n - 1), np.arange(n - 1)) <= n - 2
        vals = np.sort(e[inside])
        if not np.array_equal(vals, np.arange(1, n * (n - 1) // 2 + 1)) or np.any(e[~inside] != 0):
            raise ValueError("entries must fill the staircase with 1..N")
        rows_ok = all(np.all(np.diff(e[i, : n - 1 - i]) > 0) for i in range(n - 1))
        cols_ok = all(np.all(np.diff(e[: n - 1 - j, j]) > 0) for j in range(n - 1))
        if not (rows_ok and cols_ok):
            raise ValueError("rows and columns must increase")
        e = e.copy()
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)


def sample_tableau(n: int, seed) -> StaircaseTableau:
    if n < 2:
        raise ValueError("n must be at least 2")
    return StaircaseTableau(n, staircase_tableau(n, _seed_int(seed)))


def edelman_greene(tab: StaircaseTableau) -> SwapWord:
    return SwapWord(tab.n, tuple(edelman_greene_word(np.asarray(tab.entries, dtype=np.int64), tab.n, _TRANSPOSE)))


def stanley_count(n: int) -> int:
    """Number of sorting networks of S_n: N! / prod_k (2k - 1)^(n - k)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    denom = math.prod((2 * k - 1) ** (n - k) for k in range(1, n))
    return factorial(n * (n - 1) // 2) // denom


def enumerate_networks(n: int) -> list[SwapWord]:
    if not 2 <= n <= 5:
        raise ValueError("enumeration is limited to 2 <= n <= 5")
    size = n * (n - 1) // 2
    found = []
    word: list[int] = []
    a = list(range(1, n + 1))

    def dfs():
        if len(word) == size:
            found.append(SwapWord(n, tuple(word)))
            return
        for k in range(1, n):
            if a[k - 1] < a[k]:
                a[k - 1], a[k] = a[k], a[k - 1]
                word.append(k)
                dfs()
                word.pop()
                a[k - 1], a[k] = a[k], a[k - 1]

    dfs()
    return found


def sample_rsn(n: int, seed) -> SwapWord:
    """A uniformly random sorting network of S_n."""
    return edelman_greene(sample_tableau(n, seed))


def sample_rsn_batch(n: int, count: int, seed) -> list[SwapWord]:
    if n < 2 or count < 1:
        raise ValueError("need n >= 2 and count >= 1")
    words = rsn_words(n, count, _seed_int(seed), _TRANSPOSE)
    return [SwapWord(n, tuple(w)) for w in words]


def sample_interchange(n: int, steps: int, seed) -> PermutationProcess:
    if n < 2 or steps < 1:
        raise ValueError("need n >= 2 and steps >= 1")
    rng = np.random.default_rng(seed)
    word = rng.integers(1, n, size=steps)
    return PermutationProcess(word_snapshots(n, word))


def sample_cycle_rotation(n: int, steps: int, seed) -> PermutationProcess:
    """Rotate the n-cycle by one unit clockwise or counter-clockwise at every step."""
    if n < 1 or steps < 1:
        raise ValueError("need n >= 1 and steps >= 1")
    rng = np.random.default_rng(seed)
    shift = np.concatenate([[0], np.cumsum(rng.choice([-1, 1], size=steps))])
    snaps = (np.arange(n)[None, :] + shift[:, None]) % n + 1
    return PermutationProcess(snaps)


def bubble_network(n: int) -> SwapWord:
    """Bubble sort of rev_n read backwards in time: (1, 2, 1, 3, 2, 1, ..., n-1, ..., 1)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return SwapWord(n, tuple(k for top in range(1, n) for k in range(top, 0, -1)))


def stretchable_network(points) -> SwapWord:
    """
    Swap word obtained by rotating a planar point cloud through [0, pi/2] and
    recording changes in the order of the rotated x-coordinates.

    Pair ``(i, j)`` with ``x_i < x_j`` swaps at the angle where
    ``cos(a) x + sin(a) y`` agrees on both, which lies in (0, pi/2) only when
    ``y_i > y_j``.
    """
    pts = np.asarray(getattr(points, "points", points), dtype=float)
    m = pts.shape[0]
    if m < 2:
        raise ValueError("need at least two points")
    order = np.argsort(pts[:, 0], kind="stable")
    x, y = pts[order, 0], pts[order, 1]
    if np.any(np.diff(x) == 0) or np.unique(y).size < m:
        raise ValueError("x- and y-coordinates must be distinct")
    i, j = np.triu_indices(m, k=1)
    if np.any(y[i] <= y[j]):
        bad = np.nonzero(y[i] <= y[j])[0][0]
        raise NotANetworkError((int(order[i[bad]]), int(order[j[bad]])))
    angle = np.arctan2(x[j] - x[i], y[i] - y[j])
    # lexsort keys: last is primary; ties fall back to pair index
    seq = np.lexsort((np.arange(angle.size), angle))
    if np.any(np.diff(angle[seq]) == 0):
        warnings.warn("simultaneous crossings; breaking ties by pair index", RuntimeWarning, stacklevel=2)
    where = np.arange(m)
    occupant = np.arange(m)
    word = np.empty(angle.size, dtype=np.int64)
    for step, e in enumerate(seq):
        a, b = where[i[e]], where[j[e]]
        if abs(a - b) != 1:
            raise ValueError(f"crossing of {i[e]} and {j[e]} is not adjacent; angles too close to resolve")
        lo = min(a, b)
        word[step] = lo + 1
        p, q = occupant[lo], occupant[lo + 1]
        occupant[lo], occupant[lo + 1] = q, p
        where[p], where[q] = lo + 1, lo
    return SwapWord(m, tuple(word.tolist()))


def swap_histogram(w: SwapWord, time_window: tuple[float, float] = (0.0, 1.0)) -> np.ndarray:
    """Counts of swap positions 1..n-1 among steps k with k / N in [t0, t1); index 0 is position 1."""
    t0, t1 = time_window
    if not 0.0 <= t0 < t1 <= 1.0:
        raise ValueError(f"bad time window {time_window}")
    size = len(w)
    k = np.arange(size)
    chosen = np.asarray(w.positions, dtype=np.int64)[(k >= t0 * size) & (k < t1 * size)]
    return np.bincount(chosen - 1, minlength=w.n - 1)
