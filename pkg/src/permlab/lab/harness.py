"""
Experiment runner behind the ``permlab`` command line.

Every experiment is a function of an :class:`ExperimentConfig` that returns
named reports (JSON-able dicts), data tables (CSV text or JSON-able lists) and
a list of failed checks.  :func:`run` writes them, plus a manifest, into the
output directory.  Nothing depends on the clock, so a rerun with the same
config is byte-identical.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

import permlab
from permlab import core, energy, limits, measures, networks, transport
from permlab.lab import diagnostics

EXPERIMENTS = (
    "rsn",
    "interchange",
    "cycle",
    "archimedean",
    "discretize",
    "w2",
    "energy",
    "sum-squares",
    "enumerate",
    "stretchable",
    "plank",
    "realize",
    "report",
)

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    n: int = 100
    m: int = 2000
    steps: int = 1000
    grid_size: int = 100
    samples: int = 1
    kind: str | None = None
    a: str = "id"
    b: str = "rev"
    format: str = "csv"
    output_dir: str = "permlab-out"
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise UsageError(f"unknown experiment {self.experiment!r}")
        if self.seed is None:
            raise UsageError("a seed is required")
        self.seed = int(self.seed)
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        for name in ("n", "m", "steps", "grid_size", "samples"):
            if int(getattr(self, name)) < 1:
                raise UsageError(f"{name} must be positive")
            setattr(self, name, int(getattr(self, name)))
        if self.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        self.tolerances = {k: float(v) for k, v in sorted(self.tolerances.items())}

    def to_dict(self) -> dict:
        return asdict(self)


class Outcome:
    def __init__(self):
        self.reports: dict[str, dict] = {}
        self.tables: dict[str, object] = {}
        self.failures: list[str] = []

    def check(self, ok: bool, message: str):
        if not ok:
            self.failures.append(message)


def _tol(cfg: ExperimentConfig, name: str, default: float) -> float:
    return cfg.tolerances.setdefault(name, default)


def _ensemble_table(e, cfg: ExperimentConfig) -> object:
    if cfg.format == "json":
        return {"times": e.grid.times.tolist(), "paths": e.paths.tolist()}
    return e.to_csv()


def _permutation(label: str, n: int, seed) -> core.Permutation:
    if label == "id":
        return core.Permutation.identity(n)
    if label == "rev":
        return core.Permutation.reverse(n)
    if label == "random":
        return core.Permutation(tuple((np.random.default_rng(seed).permutation(n) + 1).tolist()))
    raise UsageError(f"unknown permutation {label!r}; use id, rev or random")


def _exp_rsn(cfg, out):
    words = networks.sample_rsn_batch(cfg.n, cfg.samples, cfg.seed)
    curves = []
    for k, w in enumerate(words):
        e = core.trajectories(core.process_from_word(w))
        out.check(core.is_sorting_network(w), f"sample {k} is not a sorting network")
        if k == 0:
            out.tables["trajectories"] = _ensemble_table(limits.linearize(e, min(cfg.grid_size, len(w))), cfg)
        curves.append(diagnostics.second_moment_curve(limits.linearize(e, cfg.grid_size)))
    out.reports["second_moment"] = diagnostics.pool_curves(curves).to_dict()


def _exp_interchange(cfg, out):
    proc = networks.sample_interchange(cfg.n, cfg.steps, cfg.seed)
    e = core.trajectories(proc)
    out.tables["trajectories"] = _ensemble_table(limits.linearize(e, min(cfg.grid_size, cfg.steps)), cfg)
    final = proc.positions()[-1]
    out.reports["endpoints"] = {"final_positions": final.tolist(), "inversions": core.inversions(proc.snapshot(proc.t_max))}


def _exp_cycle(cfg, out):
    proc = networks.sample_cycle_rotation(cfg.n, cfg.steps, cfg.seed)
    e = core.trajectories(proc)
    out.tables["trajectories"] = _ensemble_table(limits.linearize(e, min(cfg.grid_size, cfg.steps)), cfg)
    out.reports["second_moment"] = diagnostics.second_moment_curve(e).to_dict()


def _exp_archimedean(cfg, out):
    grid = core.Partition.uniform(cfg.grid_size)
    e = measures.archimedean_process(cfg.m, grid, cfg.seed)
    out.tables["trajectories"] = _ensemble_table(e, cfg)
    curve = diagnostics.second_moment_curve(e)
    out.reports["second_moment"] = curve.to_dict()
    out.reports["energy"] = energy.ensemble_energy(e, grid).to_dict()
    out.check(curve.sup_gap <= _tol(cfg, "second_moment_gap", 0.05), f"second-moment gap {curve.sup_gap:.4g} too large")


def _exp_discretize(cfg, out):
    n = cfg.n
    src = measures.archimedean_process(n, core.Partition.uniform(n), cfg.seed)
    proc = limits.discretize(src, cfg.seed)
    rep = limits.deviation_report(proc, src, seed=cfg.seed)
    out.reports["deviation"] = json.loads(rep.to_json())
    out.reports["deviation"]["source_index"] = proc.source_index.tolist()
    out.check(rep.hold, f"sup deviation {rep.sup_deviation:.4g} exceeds 4 n^(-1/4)")


def _exp_w2(cfg, out):
    s = _permutation(cfg.a, cfg.n, cfg.seed)
    t = _permutation(cfg.b, cfg.n, cfg.seed + 1)
    value = transport.w2sq_permutations(s, t)
    out.reports["distance"] = json.loads(transport.distance_report("assignment", cfg.n, value, cfg.seed))


def _exp_energy(cfg, out):
    grid = core.Partition.uniform(cfg.grid_size)
    e = measures.archimedean_process(cfg.m, grid, cfg.seed)
    out.reports["ensemble_energy"] = energy.ensemble_energy(e, grid).to_dict()
    path = energy.permuton_path_energy(
        list(grid.times), grid, lambda s, t: transport.closed_form_arch_dist(min(s, t), max(s, t)) ** 2
    )
    out.reports["path_energy_closed_form"] = path.to_dict()
    target = math.pi**2 / 3
    rel = abs(out.reports["ensemble_energy"]["total"] - target) / target
    out.check(rel <= _tol(cfg, "energy_rel", 0.02), f"ensemble energy off by {rel:.3%}")


def _exp_sum_squares(cfg, out):
    kind = cfg.kind or "archimedean"
    p = measures.sample_permuton(kind, cfg.m, cfg.seed)
    value = transport.sum_distance_squared(p)
    out.reports["sum_squares"] = {
        "kind": kind,
        "m": cfg.m,
        "value": value,
        "minimum": (8 - 4 * math.sqrt(2)) / 3,
        "identity_term": transport.identity_distance_sq(p),
    }
    if cfg.format == "json":
        out.tables["points"] = p.points.tolist()
    else:
        out.tables["points"] = p.to_csv()


def _exp_enumerate(cfg, out):
    if not 2 <= cfg.n <= 5:
        raise UsageError("enumerate supports 2 <= n <= 5")
    words = networks.enumerate_networks(cfg.n)
    expected = networks.stanley_count(cfg.n)
    out.reports["enumeration"] = {"n": cfg.n, "count": len(words), "stanley_count": expected}
    out.tables["words"] = [list(w.positions) for w in words]
    out.check(len(words) == expected, f"{len(words)} words but the hook count is {expected}")


def _exp_stretchable(cfg, out):
    kind = cfg.kind or "reverse"
    p = measures.sample_permuton(kind, cfg.m, cfg.seed)
    w = networks.stretchable_network(p)
    valid = core.is_sorting_network(w)
    out.reports["stretchable"] = {"kind": kind, "m": cfg.m, "length": len(w), "is_sorting_network": valid}
    out.tables["word"] = list(w.positions)
    out.check(valid, "stretchable word is not a sorting network")


def _exp_plank(cfg, out):
    kind = cfg.kind or "archimedean"
    p = measures.sample_permuton(kind, cfg.m, cfg.seed)
    slopes = -np.linspace(0.05, np.pi / 2 - 0.05, 16)
    floor = 2 / math.sqrt(cfg.m)
    widths = np.array([w for w in (0.05, 0.1, 0.2, 0.4) if w >= floor] or [floor])
    ratio = measures.plank_mass_ratio(p, slopes, widths)
    out.reports["plank"] = {"kind": kind, "m": cfg.m, "ratio": ratio, "widths": widths.tolist()}


def _exp_realize(cfg, out):
    grid = core.Partition.uniform(cfg.grid_size)
    coupled = measures.archimedean_coupling(cfg.m, grid, cfg.seed)
    slices = [coupled.slice(i) for i in range(len(grid))]
    real = transport.realize_discrete_path(slices, grid)
    path = energy.permuton_path_energy(slices, grid, transport.w2sq_pointsets)
    ens = energy.ensemble_energy(real, grid)
    out.reports["realization"] = {"ensemble_energy": ens.total, "path_energy": path.total, "target": math.pi**2 / 6}
    out.tables["paths"] = real.to_csv() if cfg.format == "csv" else real.paths.tolist()
    gap = abs(ens.total - path.total)
    out.check(gap <= _tol(cfg, "realize_abs", 1e-9), f"realized energy differs from the W2 sum by {gap:.3g}")


def _exp_report(cfg, out):
    summary = {}
    if os.path.isdir(cfg.output_dir):
        for name in sorted(os.listdir(cfg.output_dir)):
            if name.endswith(".json") and name not in ("manifest.json", "report.json"):
                with open(os.path.join(cfg.output_dir, name)) as fh:
                    doc = json.load(fh)
                if isinstance(doc, dict) and "result" in doc:
                    summary[name] = {"experiment": doc["config"]["experiment"], "seed": doc["config"]["seed"]}
    out.reports["report"] = {"files": summary}


_RUNNERS = {
    "rsn": _exp_rsn,
    "interchange": _exp_interchange,
    "cycle": _exp_cycle,
    "archimedean": _exp_archimedean,
    "discretize": _exp_discretize,
    "w2": _exp_w2,
    "energy": _exp_energy,
    "sum-squares": _exp_sum_squares,
    "enumerate": _exp_enumerate,
    "stretchable": _exp_stretchable,
    "plank": _exp_plank,
    "realize": _exp_realize,
    "report": _exp_report,
}


def _dump(path: str, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(config: ExperimentConfig) -> int:
    """Run one experiment and write its files; returns the process exit code."""
    out = Outcome()
    os.makedirs(config.output_dir, exist_ok=True)
    try:
        _RUNNERS[config.experiment](config, out)
    except UsageError:
        raise
    except (ValueError, ArithmeticError) as exc:
        out.failures.append(f"{type(exc).__name__}: {exc}")
    written = []
    header = {"config": config.to_dict(), "seed": config.seed, "tolerances": config.tolerances}
    for name, rep in sorted(out.reports.items()):
        fname = f"{name}.json"
        _dump(os.path.join(config.output_dir, fname), {**header, "result": rep})
        written.append(fname)
    for name, table in sorted(out.tables.items()):
        if isinstance(table, str):
            fname = f"{name}.csv"
            with open(os.path.join(config.output_dir, fname), "w") as fh:
                fh.write(table)
        else:
            fname = f"{name}.json"
            _dump(os.path.join(config.output_dir, fname), table)
        written.append(fname)
    if out.failures:
        _dump(os.path.join(config.output_dir, "diagnostic.json"), {**header, "failures": out.failures})
        written.append("diagnostic.json")
    _dump(
        os.path.join(config.output_dir, "manifest.json"),
        {
            **header,
            "version": permlab.__version__,
            "eg_reading": networks.EG_READING,
            "files": sorted(written),
            "status": "fail" if out.failures else "ok",
        },
    )
    return EXIT_NUMERIC if out.failures else EXIT_OK
