import json

import numpy as np
import pytest

from mirrorpo import cli, harness
from mirrorpo.config import parse_config


def corridor_config(tmp_path, **algo):
    algo = {"algorithm": "vpg", "step_size": 0.001, "episodes": 10, **algo}
    return parse_config({"env": {"name": "short_corridor"}, "algo": algo, "seeds": [0, 1, 2],
                         "output": {"dir": str(tmp_path / "out")}})


def write_config(tmp_path, raw):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(raw))
    return str(p)


class TestFormatting:
    def test_round_trips_doubles(self):
        for x in (0.1, -11.657709797436958, 1e-300, 2.0 / 3.0):
            assert float(harness.fmt(x)) == x
        assert harness.fmt(None) == ""
        assert harness.fmt(3) == "3"


class TestRunExperiment:
    def test_row_count_and_header(self, tmp_path):
        cfg = parse_config({"env": {}, "algo": {"algorithm": "vpg", "episodes": 10,
                                                "step_size": 0.001}, "seeds": [0]})
        harness.run_experiment(cfg, tmp_path)
        lines = (tmp_path / "seed_0.csv").read_text().splitlines()
        assert lines[0] == ",".join(harness.RUN_HEADER)
        assert len(lines) == 11

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = corridor_config(tmp_path)
        harness.run_experiment(cfg, tmp_path / "a")
        harness.run_experiment(cfg, tmp_path / "b")
        for name in ("seed_0.csv", "seed_1.csv", "seed_2.csv", "aggregate.csv", "summary.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_aggregate_recomputed_from_seed_files(self, tmp_path):
        cfg = corridor_config(tmp_path, algorithm="mpo", episodes=30)
        harness.run_experiment(cfg, tmp_path)
        per_seed = [harness.read_csv(tmp_path / f"seed_{s}.csv") for s in (0, 1, 2)]
        agg = harness.read_csv(tmp_path / "aggregate.csv")
        for i, row in enumerate(agg):
            for field in ("exact_J", "est_return", "theta_norm"):
                vals = np.array([float(f[i][field]) for f in per_seed])
                np.testing.assert_allclose(float(row[f"{field}_mean"]), vals.mean(), atol=1e-12)
                np.testing.assert_allclose(float(row[f"{field}_std"]), vals.std(), atol=1e-12)

    def test_summary_records_zeta(self, tmp_path):
        cfg = corridor_config(tmp_path, algorithm="mpo",
                              mirror={"kind": "pnorm", "p": 1.5})
        harness.run_experiment(cfg, tmp_path)
        rows = harness.read_csv(tmp_path / "summary.csv")
        assert [r["seed"] for r in rows] == ["0", "1", "2"]
        assert all(float(r["zeta"]) == 0.5 for r in rows)

    def test_oracle_columns_empty_when_disabled(self, tmp_path):
        cfg = parse_config({"env": {}, "algo": {"algorithm": "vpg", "episodes": 3,
                                                "step_size": 0.001},
                            "seeds": [0], "oracle_logging": False})
        harness.run_experiment(cfg, tmp_path)
        rows = harness.read_csv(tmp_path / "seed_0.csv")
        assert all(r["exact_J"] == "" and r["bregman_grad_norm"] == "" for r in rows)

    def test_seed_offset(self, tmp_path):
        cfg = corridor_config(tmp_path)
        res = harness.run_experiment(cfg, tmp_path, seed_offset=10)
        assert [r.seed for r in res[0].records] == [10, 11, 12]
        assert (tmp_path / "seed_12.csv").exists()

    def test_workers_match_serial(self, tmp_path):
        cfg = corridor_config(tmp_path)
        harness.run_experiment(cfg, tmp_path / "a", workers=1)
        harness.run_experiment(cfg, tmp_path / "b", workers=2)
        assert ((tmp_path / "a" / "aggregate.csv").read_bytes()
                == (tmp_path / "b" / "aggregate.csv").read_bytes())


class TestGridAndSweep:
    def test_grid_reports_best(self, tmp_path):
        cfg = corridor_config(tmp_path, algorithm="mpo", episodes=20)
        best, results = harness.grid_search(cfg, out_dir=tmp_path, step_grid=(0.001, 0.002))
        assert best.mean_final_J == max(r.mean_final_J for r in results)
        rows = harness.read_csv(tmp_path / "grid.csv")
        assert [r["best"] for r in rows].count("1") == 1

    def test_default_grids(self):
        from mirrorpo.config import P_GRID, STEP_GRID
        assert STEP_GRID == (0.01, 0.02, 0.04, 0.08, 0.1)
        assert P_GRID == (1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0, 3.0, 4.0, 5.0)

    def test_sweep_p_two_equals_euclidean(self, tmp_path):
        cfg = corridor_config(tmp_path, algorithm="mpo", episodes=30)
        table = harness.sweep_p(cfg, [1.5, 2.0], tmp_path / "sweep")
        plain = harness.run_experiment(cfg, tmp_path / "plain")[0]
        p2 = [row for row in table if row[0] == 2.0][0]
        assert p2[1] == plain.mean_final_J
        assert ((tmp_path / "sweep" / "p_2" / "aggregate.csv").read_bytes()
                == (tmp_path / "plain" / "aggregate.csv").read_bytes())
        best = [row for row in table if row[3]][0]
        assert best[1] >= p2[1] - 0.5

    def test_sweep_rejects_bad_p(self, tmp_path):
        from mirrorpo.config import ConfigError
        with pytest.raises(ConfigError):
            harness.sweep_p(corridor_config(tmp_path), [1.0, 2.0], tmp_path)


class TestCompare:
    def raw(self, tmp_path, algos):
        return {"env": {}, "algo": algos, "seeds": [0, 1],
                "output": {"dir": str(tmp_path), "log_every": 5}}

    def test_aligned_by_trajectories(self, tmp_path):
        cfg = parse_config(self.raw(tmp_path, [
            {"name": "mpo", "algorithm": "mpo", "step_size": 0.001, "episodes": 40},
            {"name": "vrmpo", "algorithm": "vrmpo", "step_size": 0.001,
             "vrmpo": {"N1": 6, "N2": 2, "m": 3, "K": 4}}]))
        results, rows = harness.compare(cfg, tmp_path)
        x = [r[0] for r in rows]
        assert x == sorted(set(x))
        budgets = dict(zip(x, rows))
        # never credit an algorithm with more trajectories than it had used
        for res, col in zip(results, (1, 2)):
            first = min(r.trajectories for rec in res.records for r in rec.rows)
            assert all(budgets[b][col] is None for b in x if b < first)

    def test_single_algorithm_matches_run(self, tmp_path):
        raw = self.raw(tmp_path, [{"name": "vpg", "algorithm": "vpg", "step_size": 0.001,
                                   "episodes": 10}])
        harness.compare(parse_config(raw), tmp_path / "cmp")
        raw["algo"] = raw["algo"][0]
        harness.run_experiment(parse_config(raw), tmp_path / "run")
        assert ((tmp_path / "cmp" / "vpg" / "aggregate.csv").read_bytes()
                == (tmp_path / "run" / "aggregate.csv").read_bytes())
        cmp_rows = harness.read_csv(tmp_path / "cmp" / "compare.csv")
        agg = harness.read_csv(tmp_path / "run" / "aggregate.csv")
        assert [r["vpg"] for r in cmp_rows] == [r["exact_J_mean"] for r in agg]


class TestOracleReport:
    def test_corridor_curve(self, tmp_path):
        cfg = corridor_config(tmp_path)
        report = harness.oracle_report(cfg)
        p, v = np.array(report["value_curve"]).T
        assert 0.56 <= p[np.argmax(v)] <= 0.61
        assert len(report["points"]) == 3
        harness.write_oracle_report(report, tmp_path)
        assert (tmp_path / "value_curve.csv").exists()


class TestCli:
    def test_run_with_plots(self, tmp_path, capsys):
        path = write_config(tmp_path, {"env": {}, "algo": {"algorithm": "vpg", "episodes": 5,
                                                            "step_size": 0.001},
                                       "seeds": [0]})
        out = tmp_path / "o"
        assert cli.main(["run", path, "--out", str(out), "--plot"]) == cli.EXIT_OK
        assert (out / "seed_0.csv").exists() and (out / "aggregate.png").exists()
        assert "mean_final_J" in capsys.readouterr().out

    def test_default_output_has_no_figures(self, tmp_path):
        path = write_config(tmp_path, {"env": {}, "algo": {"algorithm": "vpg", "episodes": 5,
                                                            "step_size": 0.001},
                                       "seeds": [0]})
        cli.main(["run", path, "--out", str(tmp_path / "o")])
        assert not list((tmp_path / "o").glob("*.png"))

    def test_oracle_command(self, tmp_path):
        path = write_config(tmp_path, {"env": {}, "algo": {}, "seeds": [0]})
        assert cli.main(["oracle", path, "--out", str(tmp_path / "o"), "--plot"]) == 0
        assert (tmp_path / "o" / "value_curve.png").exists()

    def test_validation_exit_code(self, tmp_path, capsys):
        path = write_config(tmp_path, {"env": {}, "algo": {}, "seeds": [], "x": 1})
        assert cli.main(["run", path]) == cli.EXIT_CONFIG
        err = capsys.readouterr().err
        assert "seeds" in err and "'x'" in err

    def test_guard_exit_code(self, tmp_path, capsys):
        # a saturated corridor policy never reaches the terminal state
        path = write_config(tmp_path, {"env": {}, "algo": {"theta0_range": [-800, 800]},
                                       "seeds": [0]})
        assert cli.main(["oracle", path, "--out", str(tmp_path / "o")]) == cli.EXIT_GUARD
        assert "spectral radius" in capsys.readouterr().err

    def test_io_exit_code(self, tmp_path):
        assert cli.main(["run", str(tmp_path / "missing.json")]) == cli.EXIT_IO
        path = write_config(tmp_path, {"env": {}, "algo": {"episodes": 2}, "seeds": [0]})
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert cli.main(["run", path, "--out", str(blocker / "sub")]) == cli.EXIT_IO
