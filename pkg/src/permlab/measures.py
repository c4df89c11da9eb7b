"""
Samplers and constructions for permutons and permuton-valued paths.

The Archimedean measure is the law of the first two coordinates of a uniform
point on the unit 2-sphere.  Its projection onto every line through the origin
is Uniform[-1, 1], which is what makes ``cos(pi t) A_x + sin(pi t) A_y`` a
permuton process.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field

import numpy as np

from permlab.core import Partition, TrajectoryEnsemble, _interp_rows, _readonly

SQRT2 = np.sqrt(2.0)


class PermutonKind(str, enum.Enum):
    IDENTITY = "identity"
    REVERSE = "reverse"
    LEBESGUE = "lebesgue"
    ARCHIMEDEAN = "archimedean"


@dataclass(frozen=True)
class PermutonDescriptor:
    kind: PermutonKind

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", PermutonKind(self.kind))
        except ValueError:
            raise ValueError(f"unknown permuton kind {self.kind!r}") from None


@dataclass(frozen=True, eq=False)
class DiscretePermuton:
    """Equal-weight point cloud in [-1, 1]^2."""

    points: np.ndarray

    def __post_init__(self):
        p = np.array(self.points, dtype=float, copy=True)
        if p.ndim != 2 or p.shape[1] != 2 or p.shape[0] < 1:
            raise ValueError(f"points must be an (m, 2) array with m >= 1, got {p.shape}")
        if not np.all(np.isfinite(p)) or np.any(np.abs(p) > 1 + 1e-12):
            raise ValueError("coordinates must lie in [-1, 1]")
        object.__setattr__(self, "points", _readonly(p))

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y"])
        w.writerows([f"{a:.12g}", f"{b:.12g}"] for a, b in self.points)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> DiscretePermuton:
        rows = list(csv.reader(io.StringIO(text)))[1:]
        return cls(np.array([[float(a), float(b)] for a, b in rows]))


@dataclass(frozen=True, eq=False)
class PlanarEnsemble:
    """``m`` paths in [-1, 1]^2 on a shared grid; ``paths`` has shape ``(m, k+1, 2)``."""

    grid: Partition
    paths: np.ndarray
    degenerate_times: tuple[float, ...] = field(default=())

    def __post_init__(self):
        p = np.array(self.paths, dtype=float, copy=True)
        if p.ndim != 3 or p.shape[1] != len(self.grid) or p.shape[2] != 2:
            raise ValueError(f"paths must have shape (m, {len(self.grid)}, 2), got {p.shape}")
        if np.any(np.abs(p) > 1 + 1e-12):
            raise ValueError("coordinates must lie in [-1, 1]")
        object.__setattr__(self, "paths", _readonly(p))

    @property
    def m(self) -> int:
        return self.paths.shape[0]

    def slice(self, i: int) -> DiscretePermuton:
        """Point cloud at grid index ``i``."""
        return DiscretePermuton(self.paths[:, i])

    def at(self, t) -> np.ndarray:
        t_arr = np.asarray(t, dtype=float)
        out = _interp_rows(self.grid.times, self.paths, t_arr)
        return out[:, 0] if t_arr.ndim == 0 else out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["path_id", "t", "x", "y"])
        for i in range(self.m):
            for t, (a, b) in zip(self.grid.times, self.paths[i]):
                w.writerow([i, f"{t:.12g}", f"{a:.12g}", f"{b:.12g}"])
        return buf.getvalue()


def _cos_sin_half_pi(k) -> tuple[np.ndarray, np.ndarray]:
    """``cos(k pi/2)`` and ``sin(k pi/2)``, exact when ``k`` is an integer."""
    k = np.asarray(k, dtype=float)
    c, s = np.cos(k * np.pi / 2), np.sin(k * np.pi / 2)
    whole = k == np.round(k)
    r = np.mod(np.round(k), 4).astype(int)
    c = np.where(whole, np.array([1.0, 0.0, -1.0, 0.0])[r], c)
    s = np.where(whole, np.array([0.0, 1.0, 0.0, -1.0])[r], s)
    return c, s


def _archimedean_pairs(m: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((m, 3))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g[:, :2]


def sample_permuton(d: PermutonDescriptor | str, m: int, seed) -> DiscretePermuton:
    kind = PermutonDescriptor(d.kind if isinstance(d, PermutonDescriptor) else d).kind
    if m < 1:
        raise ValueError("m must be positive")
    rng = np.random.default_rng(seed)
    if kind is PermutonKind.ARCHIMEDEAN:
        return DiscretePermuton(_archimedean_pairs(m, rng))
    u = rng.uniform(-1.0, 1.0, size=m)
    if kind is PermutonKind.IDENTITY:
        pts = np.column_stack([u, u])
    elif kind is PermutonKind.REVERSE:
        pts = np.column_stack([u, -u])
    else:
        pts = np.column_stack([u, rng.uniform(-1.0, 1.0, size=m)])
    return DiscretePermuton(pts)


def archimedean_process(m: int, grid: Partition, seed) -> TrajectoryEnsemble:
    if m < 1:
        raise ValueError("m must be positive")
    a = _archimedean_pairs(m, np.random.default_rng(seed))
    c, s = _cos_sin_half_pi(2 * grid.times)
    paths = np.outer(a[:, 0], c) + np.outer(a[:, 1], s)
    return TrajectoryEnsemble(grid, paths)


def archimedean_path_marginal(t: float, m: int, seed) -> DiscretePermuton:
    """Points ``(A(0), A(t))`` of ``m`` Archimedean process draws; a fixed seed reuses the draws."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"time must lie in [0, 1], got {t}")
    a = _archimedean_pairs(m, np.random.default_rng(seed))
    c, s = _cos_sin_half_pi(2 * t)
    return DiscretePermuton(np.column_stack([a[:, 0], c * a[:, 0] + s * a[:, 1]]))


def archimedean_coupling(m: int, grid: Partition, seed) -> PlanarEnsemble:
    """Optimal coupling of the Archimedean path: each draw traces a quarter ellipse."""
    if m < 1:
        raise ValueError("m must be positive")
    a = _archimedean_pairs(m, np.random.default_rng(seed))
    c, s = _cos_sin_half_pi(grid.times)
    px = np.outer(a[:, 0], c) + np.outer(a[:, 1], s)
    py = np.outer(a[:, 0], c) - np.outer(a[:, 1], s)
    return PlanarEnsemble(grid, np.stack([px, py], axis=-1))


def archimedean_increment_sq(s: float, t: float) -> float:
    """Exact second moment of an Archimedean process increment, ``(2/3)(1 - cos(pi (t - s)))``."""
    return (2.0 / 3.0) * (1.0 - np.cos(np.pi * (t - s)))


def _grid_ranks(values: np.ndarray, u: np.ndarray) -> np.ndarray:
    order = np.lexsort((u, values))
    ranks = np.empty(values.size, dtype=np.int64)
    ranks[order] = np.arange(1, values.size + 1)
    return ranks


def distributional_transform(values, seed) -> np.ndarray:
    """
    Empirical ``2 F(z, u) - 1`` on the midpoint grid: the value of rank ``k``
    maps to ``(2k - 1)/m - 1``.  Tied values get their ranks in the order of
    independent uniforms, so the output is always a permutation of the grid.
    """
    z = np.asarray(values, dtype=float).ravel()
    if z.size == 0:
        raise ValueError("distributional transform of an empty sample")
    m = z.size
    u = np.random.default_rng(seed).random(m)
    return (2.0 * _grid_ranks(z, u) - 1.0) / m - 1.0


def rotation_rank_path(p: DiscretePermuton, grid: Partition, seed) -> PlanarEnsemble:
    """
    Path from the identity permuton towards ``p``: at time t, point i becomes
    ``(x_i, rank of cos(pi t/2) x_i + sin(pi t/2) y_i)`` on the midpoint grid.

    Slices where the rotated coordinate has ties (rounded at 1e-12 of its
    scale) are listed in ``degenerate_times``; their ties are broken at random.
    """
    if p.m < 2:
        raise ValueError("need at least two points")
    rng = np.random.default_rng(seed)
    scale = max(float(np.max(np.abs(p.points))), 1e-300)
    out = np.empty((p.m, len(grid), 2))
    out[:, :, 0] = p.x[:, None]
    flagged = []
    cos_t, sin_t = _cos_sin_half_pi(grid.times)
    for k, t in enumerate(grid.times):
        z = cos_t[k] * p.x + sin_t[k] * p.y
        z = np.round(z / scale, 12)
        if np.unique(z).size < p.m:
            flagged.append(float(t))
        out[:, k, 1] = distributional_transform(z, rng)
    return PlanarEnsemble(grid, out, tuple(flagged))


def plank_mass_ratio(p: DiscretePermuton, slopes, widths) -> float:
    """
    Largest scanned value of (fraction of points in plank) / (plank width)
    over planks ``a <= cos(s + pi/2) x + sin(s + pi/2) y <= a + w``.
    Offsets ``a`` step by ``w/2`` across [-sqrt 2, sqrt 2].
    """
    slopes = np.atleast_1d(np.asarray(slopes, dtype=float))
    widths = np.atleast_1d(np.asarray(widths, dtype=float))
    if slopes.size == 0 or widths.size == 0:
        raise ValueError("slope and width grids must be non-empty")
    floor = 2.0 / np.sqrt(p.m)
    if np.any(widths < floor):
        raise ValueError(f"plank widths must be at least 2/sqrt(m) = {floor:.4g}")
    best = 0.0
    for s in slopes:
        proj = np.sort(np.cos(s + np.pi / 2) * p.x + np.sin(s + np.pi / 2) * p.y)
        for w in widths:
            a = np.arange(-SQRT2, SQRT2, w / 2)
            inside = np.searchsorted(proj, a + w, side="right") - np.searchsorted(proj, a, side="left")
            best = max(best, float(inside.max()) / p.m / w)
    return best


def rotate_45(p) -> np.ndarray:
    """``((x - y)/sqrt 2, (x + y)/sqrt 2)`` as a plain point array (it may leave the square)."""
    pts = np.asarray(getattr(p, "points", p), dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return np.column_stack([(x - y) / SQRT2, (x + y) / SQRT2])
