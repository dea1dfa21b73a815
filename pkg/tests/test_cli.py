import json
import os

import numpy as np
import pytest

import slicegibbs as sg
from slicegibbs.cli import main


def read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


class TestListKernels:
    def test_table(self, capsys):
        assert main(["list-kernels"]) == 0
        out = capsys.readouterr().out
        assert out.count("\n") == 9

    def test_json_schema(self, capsys):
        assert main(["list-kernels", "--format", "json"]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert len(rows) == 9
        for row in rows:
            assert set(row) == {"name", "dim", "params", "requires_data"}


class TestSample:
    def test_artifacts_and_determinism(self, tmp_path, capsys):
        args = [
            "sample", "--kernel", "rosenbrock", "--sampler", "asg",
            "-n", "150", "--burn-in", "40", "--seed", "11",
        ]
        d1, d2 = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--output-dir", str(d1)]) == 0
        assert main(args + ["--output-dir", str(d2)]) == 0
        for name in ("samples.csv", "logk_trace.csv", "ess_report.json", "manifest.json"):
            assert (d1 / name).exists()
        assert read(d1 / "samples.csv") == read(d2 / "samples.csv")
        header, first = read(d1 / "samples.csv").splitlines()[:2]
        assert header == "x1,x2"
        assert len(first.split(",")) == 2
        assert sum(1 for _ in read(d1 / "samples.csv").splitlines()) == 151

    def test_plot_series_artifacts(self, tmp_path):
        d = tmp_path / "series"
        main(["sample", "--kernel", "rosenbrock", "-n", "200", "--burn-in", "50",
              "--seed", "1", "--output-dir", str(d)])
        acf_lines = read(d / "acf.csv").splitlines()
        assert acf_lines[0] == "lag,x1,x2"
        first = [float(v) for v in acf_lines[1].split(",")]
        assert first == [0.0, 1.0, 1.0]  # lag-0 autocorrelation
        rm_lines = read(d / "running_mean.csv").splitlines()
        assert rm_lines[0] == "draw,x1,x2"
        assert len(rm_lines) == 201

    def test_samples_round_trip_full_precision(self, tmp_path):
        d = tmp_path / "run"
        main(["sample", "--kernel", "rosenbrock", "-n", "50", "--burn-in", "10",
              "--seed", "3", "--output-dir", str(d)])
        text = read(d / "samples.csv").splitlines()
        loaded = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
        out = sg.run_asg(
            sg.make_kernel("rosenbrock"),
            config=sg.ChainConfig(n_samples=50, burn_in=10, seed=3),
        )
        assert np.array_equal(loaded, out.samples)

    def test_rwmh_report_has_acceptance_rate(self, tmp_path):
        d = tmp_path / "r"
        main(["sample", "--kernel", "rosenbrock", "--sampler", "rwmh",
              "-n", "100", "--burn-in", "20", "--seed", "2", "--output-dir", str(d)])
        rep = json.loads(read(d / "ess_report.json"))
        assert 0.0 < rep["acceptance_rate"] < 1.0
        assert rep["n_samples"] == 100

    def test_manifest_replay_bit_identical(self, tmp_path):
        d1 = tmp_path / "orig"
        d2 = tmp_path / "replay"
        main(["sample", "--kernel", "beta_mixture", "-n", "120", "--burn-in", "30",
              "--seed", "5", "--output-dir", str(d1)])
        assert main(["sample", "--from-manifest", str(d1 / "manifest.json"),
                     "--output-dir", str(d2)]) == 0
        assert read(d1 / "samples.csv") == read(d2 / "samples.csv")

    def test_rwmh_manifest_replay(self, tmp_path):
        d1, d2 = tmp_path / "r1", tmp_path / "r2"
        main(["sample", "--kernel", "ackley", "--sampler", "rwmh", "-n", "90",
              "--burn-in", "20", "--seed", "8", "--proposal-sd", "0.5,0.7",
              "--output-dir", str(d1)])
        assert main(["sample", "--from-manifest", str(d1 / "manifest.json"),
                     "--output-dir", str(d2)]) == 0
        assert read(d1 / "samples.csv") == read(d2 / "samples.csv")

    def test_sample_without_kernel_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["sample", "-n", "10"])
        assert err.value.code == 2

    def test_lasso_kernel_via_synthetic_flag(self, tmp_path):
        d = tmp_path / "l"
        rc = main(["sample", "--kernel", "lasso_bridge", "--synthetic", "60,5,2,1.0",
                   "-n", "80", "--burn-in", "20", "--output-dir", str(d)])
        assert rc == 0
        header = read(d / "samples.csv").splitlines()[0]
        assert header == ",".join(f"x{i+1}" for i in range(6))


class TestSupport:
    def test_golden_row(self, capsys):
        assert main(["support", "--kernel", "rosenbrock", "--coord", "2",
                     "--fixed", "0"]) == 0
        res = json.loads(capsys.readouterr().out)
        assert abs(res["lower"] + 1.256894) <= 5e-3
        assert abs(res["upper"] - 1.256894) <= 5e-3
        assert res["method"] == "cauchy_transform"

    def test_horizontal_bound_row(self, capsys):
        assert main(["support", "--kernel", "rosenbrock", "--coord", "1",
                     "--fixed", "1"]) == 0
        res = json.loads(capsys.readouterr().out)
        assert abs(res["lower"] + 1.426) <= 5e-3
        assert abs(res["upper"] - 1.426) <= 5e-3

    def test_one_dim_kernel_needs_no_fixed(self, capsys):
        assert main(["support", "--kernel", "beta_mixture"]) == 0
        res = json.loads(capsys.readouterr().out)
        assert res["lower"] == pytest.approx(-5.0, abs=0.01)
        assert res["upper"] == pytest.approx(7.0, abs=0.01)

    def test_bad_coord_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["support", "--kernel", "rosenbrock", "--coord", "3", "--fixed", "0"])
        assert err.value.code == 2


class TestBenchmark:
    def test_small_suite(self, tmp_path, capsys):
        d = tmp_path / "bench"
        rc = main([
            "benchmark", "--kernels", "rosenbrock", "--samplers", "asg,rwmh",
            "-n", "80", "--burn-in", "20", "--replicates", "2",
            "--seed", "1", "--jobs", "1", "--output-dir", str(d),
        ])
        assert rc == 0
        rep = json.loads(read(d / "benchmark_report.json"))
        assert rep["suite"]["budget"] == "fixed_samples"
        assert len(rep["results"]["cells"]) == 4
        assert rep["results"]["failures"] == 0
        # stored per-cell ESS equals recomputing diagnostics on the CSV
        cell = rep["results"]["cells"][0]
        text = read(os.path.join(cell["artifacts"], "samples.csv")).splitlines()
        S = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
        again = sg.ess_report(S, cell["wall_time_seconds"])
        assert np.allclose(again.per_dim_ess, cell["per_dim_ess"], rtol=0, atol=1e-9)

    def test_parallel_jobs(self, tmp_path):
        d = tmp_path / "bench2"
        rc = main([
            "benchmark", "--kernels", "rosenbrock", "--samplers", "rwmh",
            "-n", "60", "--burn-in", "10", "--replicates", "2",
            "--jobs", "2", "--output-dir", str(d),
        ])
        assert rc == 0
        rep = json.loads(read(d / "benchmark_report.json"))
        assert rep["results"]["failures"] == 0

    def test_fixed_time_budget(self, tmp_path):
        d = tmp_path / "bench3"
        rc = main([
            "benchmark", "--kernels", "rosenbrock", "--samplers", "rwmh",
            "-n", "100", "--seconds", "0.3", "--output-dir", str(d),
        ])
        assert rc == 0
        rep = json.loads(read(d / "benchmark_report.json"))
        series = rep["results"]["series"][0]["rows"]
        assert len(series) >= 1
        assert {"n_samples", "log10_n", "ess_per_second"} <= set(series[0])

    def test_empty_suite_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["benchmark", "--kernels", "", "--samplers", "asg"])
        assert err.value.code == 2

    def test_unknown_kernel_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["benchmark", "--kernels", "nope", "--samplers", "asg"])
        assert err.value.code == 2


class TestLasso:
    def test_posterior_summary_schema(self, tmp_path):
        d = tmp_path / "lasso"
        rc = main([
            "lasso", "--synthetic", "50,4,2,1.0", "-n", "400", "--burn-in", "100",
            "--seed", "3", "--output-dir", str(d),
        ])
        assert rc == 0
        summ = json.loads(read(d / "posterior_summary.json"))
        assert len(summ["coefficients"]) == 5
        for c in summ["coefficients"]:
            assert set(c) == {"name", "posterior_mode", "posterior_mean", "ci_2.5", "ci_97.5"}
            assert c["ci_2.5"] <= c["posterior_mean"] <= c["ci_97.5"]
        assert (d / "samples.csv").exists()
        assert (d / "manifest.json").exists()

    def test_missing_csv_runtime_error(self, tmp_path):
        rc = main(["lasso", "--data-csv", str(tmp_path / "nope.csv"),
                   "--output-dir", str(tmp_path / "x")])
        assert rc == 1


class TestEngineBench:
    def test_runs_and_reports(self, tmp_path, capsys):
        out = tmp_path / "eb.json"
        rc = main(["engine-bench", "--kernel", "rosenbrock", "-n", "60",
                   "--burn-in", "20", "--replicates", "1", "--output", str(out)])
        assert rc == 0
        rep = json.loads(read(out))
        engines = {(r["sampler"], r["engine"]) for r in rep["runs"]}
        assert ("asg", "numpy") in engines
        assert "acf_hot_loop" in rep


class TestExitCodes:
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["--version"])
        assert err.value.code == 0

    def test_usage_error_is_2(self):
        with pytest.raises(SystemExit) as err:
            main(["sample", "--kernel", "rosenbrock", "--fallback-range", "oops"])
        assert err.value.code == 2


class TestEngineEnvVar:
    def test_invalid_value_rejected_at_import(self):
        import subprocess
        import sys

        proc = subprocess.run(
            [sys.executable, "-c", "import slicegibbs"],
            env=dict(os.environ, SLICEGIBBS_ENGINE="banana"),
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode != 0
        assert "SLICEGIBBS_ENGINE" in proc.stderr

    def test_numpy_override_disables_compiled_paths(self, tmp_path):
        import subprocess
        import sys

        d = tmp_path / "envrun"
        env = dict(os.environ, SLICEGIBBS_ENGINE="numpy")
        proc = subprocess.run(
            [sys.executable, "-m", "slicegibbs", "sample", "--kernel", "rosenbrock",
             "-n", "40", "--burn-in", "10", "--output-dir", str(d)],
            env=env, capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0, proc.stderr
        man = json.loads(read(d / "manifest.json"))
        assert man["engine"] == "numpy"
