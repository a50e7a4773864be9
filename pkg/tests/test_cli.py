"""Command-line surface: outputs, determinism, validation, config precedence."""

import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from rmtlab.outputs import read_histogram_csv


def run_cli(args, env_extra=None, cwd=None):
    import os

    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "rmtlab", *args],
        capture_output=True,
        text=True,
        env=env,
        cwd=cwd,
    )


SAMPLE_ARGS = [
    "sample", "--ensemble", "plbm", "--n", "64", "--s", "0.7", "--eps", "1.0",
    "--realisations", "30", "--seed", "42",
]


class TestSample:
    def test_histogram_is_normalized(self, tmp_path):
        res = run_cli(SAMPLE_ARGS + ["--out", str(tmp_path)])
        assert res.returncode == 0, res.stderr
        centers, density = read_histogram_csv(tmp_path / "histogram.csv")
        width = centers[1] - centers[0]
        assert float(np.sum(density) * width) == pytest.approx(1.0, abs=1e-12)
        meta = json.loads((tmp_path / "metadata.json").read_text())
        assert meta["spec"]["master_seed"] == 42
        assert meta["rng"]["bit_generator"] == "philox4x64-10"

    def test_reruns_are_byte_identical(self, tmp_path):
        run_cli(SAMPLE_ARGS + ["--out", str(tmp_path / "a")])
        run_cli(SAMPLE_ARGS + ["--out", str(tmp_path / "b")])
        a = (tmp_path / "a" / "histogram.csv").read_bytes()
        b = (tmp_path / "b" / "histogram.csv").read_bytes()
        assert a == b

    def test_worker_count_never_changes_files(self, tmp_path):
        outs = {}
        for threads in (1, 4, 8):
            out = tmp_path / f"t{threads}"
            res = run_cli(SAMPLE_ARGS + ["--out", str(out), "--threads", str(threads)])
            assert res.returncode == 0, res.stderr
            outs[threads] = (out / "histogram.csv").read_bytes()
        assert outs[1] == outs[4] == outs[8]

    def test_umm_dimension_validation(self, tmp_path):
        res = run_cli(
            ["sample", "--ensemble", "umm", "--n", "500", "--realisations", "2",
             "--out", str(tmp_path)]
        )
        assert res.returncode != 0
        assert "N must be a power of two" in res.stderr

    def test_env_seed_overrides_config_but_not_flag(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text("[common]\nseed = 1\n")
        base = ["sample", "--ensemble", "plbm", "--n", "64", "--realisations", "2",
                "--config", str(cfg)]
        res = run_cli(base + ["--out", str(tmp_path / "a")], env_extra={"RMTLAB_SEED": "7"})
        meta = json.loads((tmp_path / "a" / "metadata.json").read_text())
        assert meta["spec"]["master_seed"] == 7
        res = run_cli(base + ["--seed", "9", "--out", str(tmp_path / "b")],
                      env_extra={"RMTLAB_SEED": "7"})
        meta = json.loads((tmp_path / "b" / "metadata.json").read_text())
        assert meta["spec"]["master_seed"] == 9

    def test_config_supplies_defaults_flags_win(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text(
            "[common]\nseed = 5\n\n[sample]\nensemble = 'plbm'\nn = 64\nrealisations = 3\ns = 0.3\n"
        )
        res = run_cli(["sample", "--config", str(cfg), "--s", "0.7", "--out", str(tmp_path / "o")])
        assert res.returncode == 0, res.stderr
        meta = json.loads((tmp_path / "o" / "metadata.json").read_text())
        assert meta["spec"]["s"] == 0.7
        assert meta["spec"]["master_seed"] == 5
        assert meta["realisations"] == 3


class TestFit:
    def test_fit_json_schema(self, tmp_path):
        run_cli(["sample", "--ensemble", "plbm", "--n", "128", "--s", "0.7",
                 "--realisations", "150", "--seed", "1", "--components", "spread",
                 "--out", str(tmp_path)])
        res = run_cli(["fit", str(tmp_path / "histogram.csv"), "--out", str(tmp_path)])
        assert res.returncode == 0, res.stderr
        fit = json.loads((tmp_path / "fit.json").read_text())
        for key in ("lambda", "xi", "alpha", "delta", "objective", "iterations", "converged"):
            assert key in fit
        assert fit["protocol"]["density_floor"] == 0.01

    def test_malformed_csv_reports_line(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("bin_center,density\n0.1,0.5\noops\n")
        res = run_cli(["fit", str(bad), "--out", str(tmp_path)])
        assert res.returncode != 0
        assert ":3:" in res.stderr


class TestOtherCommands:
    def test_diagnostics_json(self, tmp_path):
        res = run_cli(["diagnostics", "--ensemble", "plbm", "--n", "64", "--s", "1.3",
                       "--orders", "1,2", "--realisations", "20", "--out", str(tmp_path)])
        assert res.returncode == 0, res.stderr
        data = json.loads((tmp_path / "diagnostics.json").read_text())
        assert data["regime"] == "localized"
        assert "1" in data["trace_moments"] and "2" in data["trace_moments"]

    def test_scan_outputs(self, tmp_path):
        res = run_cli(["scan-n", "--ensemble", "plbm", "--n", "64", "--s", "0.7",
                       "--n-list", "64,128", "--realisations", "20", "--out", str(tmp_path)])
        assert res.returncode == 0, res.stderr
        assert (tmp_path / "hist_n64.csv").exists()
        assert (tmp_path / "hist_n128.csv").exists()
        dist = json.loads((tmp_path / "distances.json").read_text())
        assert dist["pairs"][0]["n_a"] == 64

    def test_variance_outputs(self, tmp_path):
        res = run_cli(["variance", "--ensemble", "plbm", "--n", "64", "--s", "0.7",
                       "--m-windows", "8,16", "--realisations", "10", "--out", str(tmp_path)])
        assert res.returncode == 0, res.stderr
        from rmtlab.outputs import read_values_csv

        vals = read_values_csv(tmp_path / "variance_m8.csv")
        assert vals.size == 10 * 9

    def test_chi2_map(self, tmp_path):
        res = run_cli(["chi2-map", "--xi-list", "0.2", "--lambda-min", "0",
                       "--lambda-max", "1", "--lambda-steps", "3", "--out", str(tmp_path)])
        assert res.returncode == 0, res.stderr
        text = (tmp_path / "chi2_map_xi0.2.csv").read_text()
        assert text.splitlines()[0] == "lambda,nu"

    def test_reproduce_rejects_unknown_figure(self, tmp_path):
        res = run_cli(["reproduce", "fig99", "--out", str(tmp_path)])
        assert res.returncode != 0
        assert "fig2" in res.stderr and "fig10" in res.stderr

    def test_reproduce_fig8_desk(self, tmp_path):
        res = run_cli(["reproduce", "fig8", "--scale", "desk", "--out", str(tmp_path)])
        assert res.returncode == 0, res.stderr
        bundle = tmp_path / "fig8"
        manifest = json.loads((bundle / "manifest.json").read_text())
        assert manifest["figure"] == "fig8"
        assert len(manifest["series"]) == 3
        for entry in manifest["series"]:
            assert (bundle / entry["csv"]).exists()
