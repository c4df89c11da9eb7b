import json
import math
import os

import numpy as np
import pytest
from scipy import stats

from permlab.core import Partition, SwapWord, TrajectoryEnsemble, process_from_word, trajectories
from permlab.lab import (
    ExperimentConfig,
    epsilon_shift,
    holder_check,
    marginal_uniformity,
    second_moment_curve,
    small_time_ratio,
)
from permlab.lab.cli import main, read_config_file
from permlab.lab.diagnostics import ConjectureReport, pool_curves
from permlab.lab.harness import UsageError, run
from permlab.measures import archimedean_process
from permlab.networks import sample_rsn


def brute_holder(e, delta):
    bad = 0
    t = e.grid.times
    for row in e.paths:
        d = np.abs(row[None, :] - row[:, None])
        lim = math.sqrt(8) * np.sqrt(np.abs(t[None, :] - t[:, None])) + delta
        bad += int(np.sum(np.triu(d > lim, k=1)))
    return bad


class TestSecondMoment:
    def test_starts_at_zero(self):
        rep = second_moment_curve(archimedean_process(100, Partition.uniform(10), 0))
        assert rep.empirical[0] == 0 and rep.target[0] == 0

    def test_archimedean(self):
        rep = second_moment_curve(archimedean_process(100_000, Partition.uniform(50), 1))
        assert rep.sup_gap <= 0.01

    def test_sup_gap_consistent(self):
        rep = second_moment_curve(archimedean_process(50, Partition.uniform(5), 0))
        assert rep.sup_gap == pytest.approx(max(abs(a - b) for a, b in zip(rep.empirical, rep.target)))

    def test_report_lengths(self):
        with pytest.raises(ValueError):
            ConjectureReport((0.0, 1.0), (0.0,), (0.0, 1.0), 0.0)

    def test_pool(self):
        reps = [second_moment_curve(archimedean_process(500, Partition.uniform(5), s)) for s in range(3)]
        pooled = pool_curves(reps)
        np.testing.assert_allclose(pooled.empirical, np.mean([r.empirical for r in reps], axis=0))

    def test_shift_invariance(self):
        grid = Partition.uniform(200)
        e = archimedean_process(50_000, grid, 2)
        base = second_moment_curve(e)
        for eps in (0.25, 0.6):
            shifted = second_moment_curve(epsilon_shift(e, eps))
            assert shifted.sup_gap == pytest.approx(base.sup_gap, abs=0.02)
            assert shifted.sup_gap <= 0.02

    def test_small_time_ratio(self):
        e = archimedean_process(50_000, Partition.uniform(100), 3)
        ratios = small_time_ratio(e, 0.05)
        assert len(ratios) == 5
        # (2/3)(1 - cos(pi t)) / t^2 tends to pi^2 / 3
        assert ratios[0][1] == pytest.approx(math.pi**2 / 3, rel=0.05)


class TestHolder:
    def test_constant(self):
        e = TrajectoryEnsemble(Partition.uniform(10), np.zeros((3, 11)))
        assert holder_check(e, 0.1)[0] == 0

    def test_jump_detected(self):
        path = np.zeros(101)
        path[51:] = 1.0
        path[:50] = -1.0
        path[50] = -1.0
        e = TrajectoryEnsemble(Partition.uniform(100), path[None, :])
        assert holder_check(e, 0.1)[0] >= 1

    @pytest.mark.parametrize("seed", range(4))
    def test_matches_all_pairs(self, seed):
        rng = np.random.default_rng(seed)
        e = TrajectoryEnsemble(Partition.uniform(40), np.clip(np.cumsum(rng.normal(0, 0.4, (3, 41)), axis=1), -1, 1))
        bad, pairs = holder_check(e, 0.05)
        assert (bad > 0) == (brute_holder(e, 0.05) > 0)
        assert pairs <= 3 * 41 * 40 // 2

    def test_rsn(self):
        e = trajectories(process_from_word(sample_rsn(200, seed=5)))
        bad, pairs = holder_check(e, 0.1)
        assert bad == 0 and pairs > 0

    def test_delta_positive(self):
        with pytest.raises(ValueError):
            holder_check(TrajectoryEnsemble(Partition.uniform(1), np.zeros((1, 2))), 0.0)


class TestUniformity:
    def test_permutation_ensemble(self):
        e = trajectories(process_from_word(SwapWord(10, (1, 2, 3, 4))))
        assert marginal_uniformity(e, 0.5).statistic <= 1 / 10 + 1e-12

    def test_archimedean(self):
        # off-grid times are interpolated; a 100-step grid keeps the chord error far below KS resolution
        e = archimedean_process(100_000, Partition.uniform(100), 40)
        for t in (0.0, 0.303, 0.5, 0.871):
            assert marginal_uniformity(e, t).pvalue > 0.01

    def test_pvalues_calibrated(self):
        # under the exact law the KS p-values are themselves uniform
        grid = Partition.uniform(2)
        ps = [marginal_uniformity(archimedean_process(2000, grid, s), 0.0).pvalue for s in range(200)]
        assert stats.kstest(ps, "uniform").pvalue > 0.001

    def test_constant_zero(self):
        e = TrajectoryEnsemble(Partition.uniform(2), np.zeros((500, 3)))
        res = marginal_uniformity(e, 0.5)
        assert res.statistic == pytest.approx(0.5)
        assert res.pvalue < 1e-6

    def test_time_range(self):
        with pytest.raises(ValueError):
            marginal_uniformity(TrajectoryEnsemble(Partition.uniform(2), np.zeros((5, 3))), 1.5)


def test_epsilon_shift_zero_is_identity():
    e = archimedean_process(30, Partition.uniform(20), 0)
    np.testing.assert_allclose(epsilon_shift(e, 0.0).paths, e.paths)


class TestConfig:
    def test_seed_required(self):
        with pytest.raises(UsageError):
            ExperimentConfig("w2", None)

    def test_unknown_experiment(self):
        with pytest.raises(UsageError):
            ExperimentConfig("plot", 1)

    def test_positive_sizes(self):
        with pytest.raises(UsageError):
            ExperimentConfig("w2", 1, n=0)

    def test_config_file(self, tmp_path):
        f = tmp_path / "exp.cfg"
        f.write_text("# demo\nn = 12\nout = results\ntol_energy_rel = 0.5\nkind=reverse\n")
        vals = read_config_file(str(f))
        assert vals == {"n": 12, "output_dir": "results", "tolerances": {"energy_rel": 0.5}, "kind": "reverse"}

    def test_config_file_unknown_key(self, tmp_path):
        f = tmp_path / "exp.cfg"
        f.write_text("colour = red\n")
        with pytest.raises(UsageError):
            read_config_file(str(f))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


class TestCli:
    def test_w2(self, tmp_path):
        out = tmp_path / "w2"
        assert main(["w2", "--a", "id", "--b", "rev", "--n", "100", "--seed", "7", "--out", str(out)]) == 0
        doc = read_json(out / "distance.json")
        assert doc["result"]["value"] == pytest.approx(4 / 3, abs=0.05)
        assert doc["seed"] == 7 and doc["config"]["n"] == 100
        manifest = read_json(out / "manifest.json")
        assert manifest["version"] and manifest["seed"] == 7
        assert manifest["eg_reading"] in ("row", "column")

    def test_enumerate(self, tmp_path):
        assert main(["enumerate", "--n", "4", "--seed", "1", "--out", str(tmp_path)]) == 0
        assert len(read_json(tmp_path / "words.json")) == 16
        assert read_json(tmp_path / "enumeration.json")["result"]["stanley_count"] == 16

    def test_rsn(self, tmp_path):
        assert main(["rsn", "--n", "100", "--samples", "20", "--seed", "7", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "trajectories.csv").read_text().startswith("path_id,")
        assert "sup_gap" in read_json(tmp_path / "second_moment.json")["result"]

    def test_byte_identical_rerun(self, tmp_path):
        args = ["realize", "--m", "100", "--grid-size", "5", "--seed", "3"]
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        files = sorted(os.listdir(tmp_path / "a"))
        assert files == sorted(os.listdir(tmp_path / "b"))
        for name in files:
            a = (tmp_path / "a" / name).read_bytes()
            b = (tmp_path / "b" / name).read_bytes()
            if name in ("manifest.json",) or name.endswith(".json"):
                a = a.replace(b"/a", b"/x")
                b = b.replace(b"/b", b"/x")
            assert a == b, name

    def test_json_format(self, tmp_path):
        assert main(["cycle", "--n", "5", "--steps", "20", "--format", "json", "--seed", "1", "--out", str(tmp_path)]) == 0
        doc = read_json(tmp_path / "trajectories.json")
        assert len(doc["paths"]) == 5

    def test_missing_seed_is_usage_error(self, tmp_path):
        assert main(["w2", "--out", str(tmp_path)]) == 2

    def test_unknown_verb_is_usage_error(self):
        assert main(["plot", "--seed", "1"]) == 2

    def test_numeric_failure_exit_code(self, tmp_path):
        assert main(["stretchable", "--kind", "archimedean", "--m", "50", "--seed", "2", "--out", str(tmp_path)]) == 1
        assert read_json(tmp_path / "diagnostic.json")["failures"]

    def test_config_file_and_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(f"seed = 5\nn = 30\nout = {tmp_path / 'o'}\n")
        assert main(["w2", "--config", str(cfg), "--n", "20"]) == 0
        assert read_json(tmp_path / "o" / "distance.json")["config"]["n"] == 20

    @pytest.mark.parametrize(
        "verb, extra",
        [
            ("interchange", ["--n", "6", "--steps", "50"]),
            ("archimedean", ["--m", "2000", "--grid-size", "20"]),
            ("discretize", ["--n", "128"]),
            ("energy", ["--m", "50000"]),
            ("sum-squares", ["--m", "1000"]),
            ("stretchable", ["--m", "50"]),
            ("plank", ["--m", "5000"]),
        ],
    )
    def test_other_verbs(self, tmp_path, verb, extra):
        assert main([verb, "--seed", "4", "--out", str(tmp_path)] + extra) == 0
        assert read_json(tmp_path / "manifest.json")["status"] == "ok"

    def test_report_verb(self, tmp_path):
        main(["w2", "--n", "10", "--seed", "1", "--out", str(tmp_path)])
        assert main(["report", "--seed", "1", "--out", str(tmp_path)]) == 0
        assert "distance.json" in read_json(tmp_path / "report.json")["result"]["files"]

    def test_run_directly(self, tmp_path):
        assert run(ExperimentConfig("enumerate", 0, n=3, output_dir=str(tmp_path))) == 0
