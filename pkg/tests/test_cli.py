"""Command-line surface: every subcommand, JSON payload shapes, exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest

from obcs.cli import main
from obcs.measurement import (
    GAUSSIAN_IID,
    MeasurementSet,
    SamplingDistribution,
    sample_rows,
    save_measurements_csv,
)
from obcs.sparse_core import vector_to_json
from obcs.vc_tools import build_witness


@pytest.fixture
def measurement_csv(tmp_path):
    dist = SamplingDistribution(kind=GAUSSIAN_IID, offset_scale=1.0)
    rows, offsets = sample_rows(dist, 30, 6, seed=0)
    truth = np.array([0.8, 0.0, -0.6, 0.0, 0.0, 0.0])
    labels = np.sign(rows @ truth + offsets)
    linear = tmp_path / "linear.csv"
    affine = tmp_path / "affine.csv"
    save_measurements_csv(MeasurementSet(rows=rows, labels=np.where(
        rows @ truth >= 0, 1, -1)), linear)
    save_measurements_csv(MeasurementSet(rows=rows, labels=np.where(
        labels >= 0, 1, -1), offsets=offsets), affine)
    return {"linear": linear, "affine": affine}


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


@pytest.mark.parametrize("method,which", [
    ("l1svm", "linear"), ("pv", "linear"),
    ("l1svm-affine", "affine"), ("ksw", "affine"),
])
def test_solve_every_method(measurement_csv, capsys, method, which):
    rc = main(["solve", "--input", str(measurement_csv[which]),
               "--method", method])
    assert rc == 0
    payload = _json_out(capsys)
    assert set(payload) == {"estimate", "offset_coefficient", "objective",
                            "status", "slack_total", "iterations"}
    assert payload["status"] == "optimal"
    assert len(payload["estimate"]) == 6
    if which == "linear":
        assert payload["offset_coefficient"] is None


def test_solve_truncation_flag(measurement_csv, capsys):
    rc = main(["solve", "--input", str(measurement_csv["linear"]),
               "--method", "l1svm", "--truncate-k", "1"])
    assert rc == 0
    payload = _json_out(capsys)
    assert np.count_nonzero(payload["estimate"]) <= 1


def test_solve_writes_to_a_file_when_asked(measurement_csv, tmp_path, capsys):
    out = tmp_path / "solution.json"
    rc = main(["solve", "--input", str(measurement_csv["linear"]),
               "--method", "l1svm", "--output", str(out)])
    assert rc == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["status"] == "optimal"


def test_solve_rejects_a_bad_lambda(measurement_csv, capsys):
    rc = main(["solve", "--input", str(measurement_csv["linear"]),
               "--method", "l1svm", "--lambda", "2.0"])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_solve_unknown_method_is_a_usage_error(measurement_csv):
    with pytest.raises(SystemExit):
        main(["solve", "--input", str(measurement_csv["linear"]),
              "--method", "nonsense"])


def test_evaluate_reports_the_score(tmp_path, capsys):
    truth = tmp_path / "truth.json"
    estimate = tmp_path / "estimate.json"
    truth.write_text(vector_to_json(np.array([1.0, 0.0, 0.0])))
    estimate.write_text(vector_to_json(np.array([0.0, 1.0, 0.0])))
    rc = main(["evaluate", "--estimate", str(estimate), "--truth", str(truth)])
    assert rc == 0
    payload = _json_out(capsys)
    assert payload["mse"] == pytest.approx(2.0 / 3.0)
    assert payload["support_hits"] == 0
    assert payload["gen_error_J"] == pytest.approx(0.5)
    assert payload["rho"] == pytest.approx(1.0)
    assert payload["direction_defined"] is True
    assert payload["noisy_risk_JN"] is None


def test_evaluate_appends_csv_rows(tmp_path, capsys):
    truth = tmp_path / "truth.json"
    truth.write_text(vector_to_json(np.array([1.0, 0.0])))
    log = tmp_path / "scores.csv"
    for _ in range(2):
        rc = main(["evaluate", "--estimate", str(truth), "--truth", str(truth),
                   "--append-csv", str(log)])
        assert rc == 0
        capsys.readouterr()
    lines = log.read_text().splitlines()
    assert len(lines) == 3
    assert lines[0].split(",")[:3] == ["mse", "support_hits", "gen_error_J"]
    assert lines[1] == lines[2]


def test_evaluate_with_a_distribution_literal_adds_noisy_risk(tmp_path, capsys):
    truth = tmp_path / "truth.json"
    truth.write_text(vector_to_json(np.array([1.0, 0.0])))
    dist = json.dumps(SamplingDistribution(kind=GAUSSIAN_IID).to_dict())
    rc = main(["evaluate", "--estimate", str(truth), "--truth", str(truth),
               "--dist", dist, "--alpha", "0.2", "--trials", "20000"])
    assert rc == 0
    payload = _json_out(capsys)
    assert abs(payload["noisy_risk_JN"] - 0.2) <= 0.02


def test_evaluate_sparse_form_and_explicit_k(tmp_path, capsys):
    truth = tmp_path / "truth.json"
    estimate = tmp_path / "estimate.json"
    truth.write_text(json.dumps({"dim": 4, "entries": [[0, 1.0], [2, -1.0]]}))
    estimate.write_text(vector_to_json(np.array([1.0, 0.0, -1.0, 0.0])))
    rc = main(["evaluate", "--estimate", str(estimate), "--truth", str(truth),
               "--k", "2"])
    assert rc == 0
    assert _json_out(capsys)["support_hits"] == 2


def test_evaluate_malformed_vector_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    good = tmp_path / "good.json"
    bad.write_text(json.dumps({"dim": 0, "entries": []}))
    good.write_text(vector_to_json(np.array([1.0])))
    rc = main(["evaluate", "--estimate", str(bad), "--truth", str(good)])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_vc_bounds_payload(capsys):
    rc = main(["vc", "bounds", "--n", "1000", "--k", "20"])
    assert rc == 0
    payload = _json_out(capsys)
    assert payload == {"n": 1000, "k": 20, "affine": False,
                       "lower": 120, "upper": 456}


def test_vc_bounds_affine_flag(capsys):
    rc = main(["vc", "bounds", "--n", "1000", "--k", "20", "--affine"])
    assert rc == 0
    assert _json_out(capsys)["upper"] == 479


def test_vc_bounds_bad_arguments_exit_2(capsys):
    rc = main(["vc", "bounds", "--n", "1", "--k", "1"])
    assert rc == 2


def test_vc_witness_emits_integer_csv(capsys):
    rc = main(["vc", "witness", "--n", "4", "--k", "1", "--verify"])
    assert rc == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert [row.split(",") for row in out] == [
        ["1", "-1", "-1"], ["1", "-1", "1"], ["1", "1", "-1"], ["1", "1", "1"]]


def test_vc_shatter_on_the_witness_columns(tmp_path, capsys):
    pts = tmp_path / "points.csv"
    with open(pts, "w") as fh:
        for row in build_witness(4, 1).points:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    rc = main(["vc", "shatter", "--points", str(pts), "--k", "1"])
    assert rc == 0
    payload = _json_out(capsys)
    assert payload == {"points": 3, "k": 1, "shattered": True}


def test_vc_shatter_rejects_an_empty_file(tmp_path, capsys):
    pts = tmp_path / "points.csv"
    pts.write_text("")
    rc = main(["vc", "shatter", "--points", str(pts), "--k", "1"])
    assert rc == 2


def test_bounds_plan_payload(capsys):
    rc = main(["bounds", "--n", "1000", "--k", "20",
               "--eps", "0.1", "--delta", "0.1"])
    assert rc == 0
    payload = _json_out(capsys)
    assert payload["d_used"] == 456
    assert payload["m_required"] == 283254
    assert payload["mse_guarantee"] == pytest.approx(0.45528674114653234)
    assert payload["rate_upper"] <= 0.1
    assert "noisy_rate_bound" not in payload


def test_bounds_noisy_flag_extends_the_payload(capsys):
    rc = main(["bounds", "--n", "100", "--k", "3",
               "--eps", "0.2", "--delta", "0.2", "--noisy"])
    assert rc == 0
    payload = _json_out(capsys)
    for key in ("noisy_rate_bound", "noisy_rate_bound_log",
                "uniform_convergence_bound", "uniform_convergence_bound_log"):
        assert key in payload
    assert payload["noisy_rate_bound_log"] >= payload["uniform_convergence_bound_log"]


def test_experiment_run_writes_the_artifacts(tmp_path, capsys):
    config = {
        "n": 12, "k": 2, "m_grid": [10, 20], "trials": 2,
        "methods": ["l1svm"], "lambda": 0.05, "master_seed": 7,
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(config))
    out_dir = tmp_path / "out"
    rc = main(["experiment", "run", "--config", str(cfg_path),
               "--out", str(out_dir)])
    assert rc == 0
    payload = _json_out(capsys)
    assert payload["count"] == 4
    assert (out_dir / "records.csv").exists()
    assert (out_dir / "summary.csv").exists()
    assert json.loads((out_dir / "meta.json").read_text())["config"]["n"] == 12


def test_experiment_run_rejects_a_bad_config(tmp_path, capsys):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps({"n": 12, "k": 2}))
    rc = main(["experiment", "run", "--config", str(cfg_path),
               "--out", str(tmp_path / "out")])
    assert rc == 2


def test_installed_entry_point_round_trip():
    proc = subprocess.run([sys.executable, "-m", "obcs.cli", "vc", "bounds",
                           "--n", "8", "--k", "2"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["lower"] == 6
