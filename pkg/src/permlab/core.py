"""
Permutations, swap words, permutation processes and their rescaled trajectories.

One-line arrays are 1-based: ``one_line[i - 1]`` is the value at position ``i``.
A swap at position ``k`` exchanges the entries at positions ``k`` and ``k + 1``
(right multiplication by the adjacent transposition).  Read as a wiring
diagram, a snapshot lists which particle (labelled by its starting position)
currently occupies each position, so a particle's trajectory is read off the
inverse snapshot.

>>> w = SwapWord(3, (1, 2, 1))
>>> [p.one_line for p in process_from_word(w)]
[(1, 2, 3), (2, 1, 3), (2, 3, 1), (3, 2, 1)]
>>> trajectories(process_from_word(w)).paths[0].round(4).tolist()
[-0.3333, 0.3333, 1.0, 1.0]
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from permlab._kernels import rows_are_permutations, word_snapshots


class DegenerateProcessError(ValueError):
    """A process with no time steps cannot be turned into trajectories."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Permutation:
    one_line: tuple[int, ...]

    def __post_init__(self):
        one_line = tuple(int(v) for v in self.one_line)
        if not one_line:
            raise ValueError("a permutation needs n >= 1")
        if sorted(one_line) != list(range(1, len(one_line) + 1)):
            raise ValueError(f"not a permutation of 1..{len(one_line)}: {one_line}")
        object.__setattr__(self, "one_line", one_line)

    @property
    def n(self) -> int:
        return len(self.one_line)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def reverse(cls, n: int) -> Permutation:
        return cls(tuple(range(n, 0, -1)))

    def __call__(self, i: int) -> int:
        return self.one_line[i - 1]

    def __len__(self) -> int:
        return self.n

    def as_array(self) -> np.ndarray:
        return np.asarray(self.one_line, dtype=np.int64)

    def inverse(self) -> Permutation:
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.as_array() - 1] = np.arange(1, self.n + 1)
        return Permutation(tuple(inv.tolist()))

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "one_line": list(self.one_line)})

    @classmethod
    def from_json(cls, text: str) -> Permutation:
        record = json.loads(text)
        p = cls(tuple(record["one_line"]))
        if p.n != record["n"]:
            raise ValueError("record n does not match one_line length")
        return p


@dataclass(frozen=True)
class SwapWord:
    n: int
    positions: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        positions = tuple(int(k) for k in self.positions)
        bad = [k for k in positions if not 1 <= k <= self.n - 1]
        if bad:
            raise ValueError(f"swap positions must lie in [1, {self.n - 1}], got {bad[:5]}")
        object.__setattr__(self, "positions", positions)

    def __len__(self) -> int:
        return len(self.positions)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "positions": list(self.positions)})

    @classmethod
    def from_json(cls, text: str) -> SwapWord:
        record = json.loads(text)
        return cls(record["n"], tuple(record["positions"]))


@dataclass(frozen=True, eq=False)
class PermutationProcess:
    """
    Snapshots ``sigma_0 = id, sigma_1, ..., sigma_{t_max}`` stored as a
    ``(t_max + 1, n)`` integer array of one-line words.

    ``source_index`` is optional bookkeeping: when a process was built by
    ranking sampled paths, entry ``i`` names the source path followed by
    particle ``i + 1``.
    """

    array: np.ndarray
    source_index: np.ndarray | None = field(default=None)

    def __post_init__(self):
        a = np.array(self.array, dtype=np.int32, copy=True)
        if a.ndim != 2 or a.shape[1] < 1:
            raise ValueError("snapshots must form a (t_max + 1, n) array")
        n = a.shape[1]
        if not np.array_equal(a[0], np.arange(1, n + 1)):
            raise ValueError("snapshot 0 must be the identity")
        if not rows_are_permutations(a):
            raise ValueError("every snapshot must be a permutation")
        object.__setattr__(self, "array", _readonly(a))
        if self.source_index is not None:
            object.__setattr__(self, "source_index", _readonly(np.array(self.source_index)))

    @property
    def n(self) -> int:
        return self.array.shape[1]

    @property
    def t_max(self) -> int:
        return self.array.shape[0] - 1

    @property
    def snapshots(self) -> list[Permutation]:
        return list(self)

    def snapshot(self, t: int) -> Permutation:
        return Permutation(tuple(self.array[t].tolist()))

    def __len__(self) -> int:
        return self.t_max + 1

    def __iter__(self) -> Iterator[Permutation]:
        return (self.snapshot(t) for t in range(len(self)))

    def positions(self) -> np.ndarray:
        """Position (1..n) of each particle at each time: the inverse snapshots."""
        pos = np.empty_like(self.array)
        rows = np.arange(self.array.shape[0])[:, None]
        pos[rows, self.array - 1] = np.arange(1, self.n + 1, dtype=self.array.dtype)
        return pos

    @classmethod
    def from_positions(cls, positions: np.ndarray, source_index=None) -> PermutationProcess:
        positions = np.asarray(positions)
        snaps = np.empty(positions.shape, dtype=np.int32)
        rows = np.arange(positions.shape[0])[:, None]
        snaps[rows, positions - 1] = np.arange(1, positions.shape[1] + 1, dtype=np.int32)
        return cls(snaps, source_index)


@dataclass(frozen=True, eq=False)
class Partition:
    times: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=float, copy=True).ravel()
        if t.size < 2:
            raise ValueError("a partition needs at least the two endpoints")
        if t[0] != 0.0 or t[-1] != 1.0:
            raise ValueError(f"partition must start at 0 and end at 1, got {t[0]}..{t[-1]}")
        if np.any(np.diff(t) <= 0):
            raise ValueError("partition times must be strictly increasing")
        object.__setattr__(self, "times", _readonly(t))

    @classmethod
    def uniform(cls, k: int) -> Partition:
        if k < 1:
            raise ValueError("need at least one interval")
        t = np.arange(k + 1) / k
        return cls(t)

    @property
    def mesh(self) -> float:
        return float(np.max(np.diff(self.times)))

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.times)

    def __len__(self) -> int:
        return self.times.size

    def __contains__(self, other: Partition) -> bool:
        return bool(np.all(np.isin(other.times, self.times)))

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and np.array_equal(self.times, other.times)

    def __hash__(self):
        return hash(self.times.tobytes())


def _interp_rows(times: np.ndarray, values: np.ndarray, t) -> np.ndarray:
    """Linear interpolation of every row of ``values`` (shape ``(m, k+1, ...)``) at ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    j = np.clip(np.searchsorted(times, t, side="right") - 1, 0, times.size - 2)
    lam = (t - times[j]) / (times[j + 1] - times[j])
    lam = lam.reshape((1, -1) + (1,) * (values.ndim - 2))
    return (1 - lam) * values[:, j] + lam * values[:, j + 1]


@dataclass(frozen=True, eq=False)
class TrajectoryEnsemble:
    """``m`` piecewise-linear paths with values in [-1, 1] on a shared grid."""

    grid: Partition
    paths: np.ndarray

    def __post_init__(self):
        v = np.array(self.paths, dtype=float, copy=True)
        if v.ndim != 2 or v.shape[1] != len(self.grid):
            raise ValueError(f"paths must have shape (m, {len(self.grid)}), got {v.shape}")
        if v.shape[0] < 1:
            raise ValueError("an ensemble needs at least one path")
        if np.any(np.abs(v) > 1 + 1e-12) or not np.all(np.isfinite(v)):
            raise ValueError("path values must lie in [-1, 1]")
        object.__setattr__(self, "paths", _readonly(np.clip(v, -1.0, 1.0)))

    @property
    def m(self) -> int:
        return self.paths.shape[0]

    def at(self, t) -> np.ndarray:
        """Values of all paths at time(s) ``t``; shape ``(m,)`` for scalar ``t``."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0) or np.any(t_arr > 1):
            raise ValueError(f"time must lie in [0, 1], got {t}")
        out = _interp_rows(self.grid.times, self.paths, t_arr)
        return out[:, 0] if t_arr.ndim == 0 else out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["path_id"] + [f"{t:.12g}" for t in self.grid.times])
        for i, row in enumerate(self.paths):
            writer.writerow([i] + [f"{v:.12g}" for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> TrajectoryEnsemble:
        rows = list(csv.reader(io.StringIO(text)))
        times = [float(t) for t in rows[0][1:]]
        paths = [[float(v) for v in r[1:]] for r in rows[1:]]
        return cls(Partition(times), np.array(paths))


def apply_swap(p: Permutation, pos: int) -> Permutation:
    if not 1 <= pos <= p.n - 1:
        raise ValueError(f"swap position {pos} outside [1, {p.n - 1}]")
    a = list(p.one_line)
    a[pos - 1], a[pos] = a[pos], a[pos - 1]
    return Permutation(tuple(a))


def inversions(p: Permutation) -> int:
    a = p.as_array()
    # O(n^2) memory is fine at the sizes where this is called per snapshot
    if a.size <= 2048:
        return int(np.sum(np.triu(a[:, None] > a[None, :], k=1)))
    count, seen = 0, np.zeros(a.size + 1, dtype=np.int64)
    # Fenwick tree over values, scanning right to left
    for v in a[::-1]:
        i = v - 1
        while i > 0:
            count += seen[i]
            i -= i & -i
        i = v
        while i <= a.size:
            seen[i] += 1
            i += i & -i
    return int(count)


def is_sorting_network(w: SwapWord) -> bool:
    n = w.n
    if len(w) != n * (n - 1) // 2:
        return False
    a = list(range(1, n + 1))
    for k in w.positions:
        if a[k - 1] > a[k]:
            return False
        a[k - 1], a[k] = a[k], a[k - 1]
    return a == list(range(n, 0, -1))


def process_from_word(w: SwapWord) -> PermutationProcess:
    return PermutationProcess(word_snapshots(w.n, np.asarray(w.positions, dtype=np.int64)))


def trajectories(proc: PermutationProcess) -> TrajectoryEnsemble:
    """Rescaled particle trajectories ``2 * position / n - 1`` on the grid ``{t / t_max}``."""
    if proc.t_max == 0:
        raise DegenerateProcessError("a process with t_max = 0 has no trajectories")
    pos = proc.positions()
    return TrajectoryEnsemble(Partition.uniform(proc.t_max), (2.0 * pos.T / proc.n - 1.0))


def empirical_permuton(p: Permutation):
    from permlab.measures import DiscretePermuton

    n = p.n
    x = 2.0 * np.arange(1, n + 1) / n - 1.0
    y = 2.0 * p.as_array() / n - 1.0
    return DiscretePermuton(np.column_stack([x, y]))


def eval_path(e: TrajectoryEnsemble, path_index: int, t: float) -> float:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"time must lie in [0, 1], got {t}")
    return float(np.interp(t, e.grid.times, e.paths[path_index]))


def _window_extrema(values: np.ndarray, right: np.ndarray):
    """Row-wise max and min of ``values[:, i:right[i] + 1]`` for every ``i`` (sparse table)."""
    k = values.shape[1]
    mx, mn = [values], [values]
    span = 1
    while 2 * span <= k:
        mx.append(np.maximum(mx[-1][:, : k - 2 * span + 1], mx[-1][:, span : k - span + 1]))
        mn.append(np.minimum(mn[-1][:, : k - 2 * span + 1], mn[-1][:, span : k - span + 1]))
        span *= 2
    left = np.arange(k)
    length = right - left + 1
    level = np.floor(np.log2(length)).astype(int)
    out_max = np.empty_like(values)
    out_min = np.empty_like(values)
    for lev in np.unique(level):
        idx = np.nonzero(level == lev)[0]
        w = 1 << lev
        out_max[:, idx] = np.maximum(mx[lev][:, idx], mx[lev][:, right[idx] - w + 1])
        out_min[:, idx] = np.minimum(mn[lev][:, idx], mn[lev][:, right[idx] - w + 1])
    return out_max, out_min


def modulus_of_continuity(e: TrajectoryEnsemble, delta: float, chunk: int = 256) -> float:
    """
    Ensemble average of ``sup_{|s-t| <= delta} |Y(s) - Y(t)|``.

    For piecewise-linear paths the supremum is attained at a pair where both
    times are grid points, or one is a grid point and the other lies exactly
    ``delta`` away, so only those pairs are examined.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    times = e.grid.times
    right = np.searchsorted(times, times + delta * (1 + 1e-12), side="right") - 1
    fwd = np.minimum(times + delta, 1.0)
    bwd = np.maximum(times - delta, 0.0)
    sups = []
    for start in range(0, e.m, chunk):
        vals = e.paths[start : start + chunk]
        wmax, wmin = _window_extrema(vals, right)
        grid_sup = np.maximum(wmax - vals, vals - wmin).max(axis=1)
        ahead = np.abs(_interp_rows(times, vals, fwd) - vals).max(axis=1)
        behind = np.abs(vals - _interp_rows(times, vals, bwd)).max(axis=1)
        sups.append(np.maximum(grid_sup, np.maximum(ahead, behind)))
    return float(np.mean(np.concatenate(sups)))
