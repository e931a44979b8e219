import json
import os

import pytest

from zonoreach import cli


def run(argv):
    return cli.main(argv)


def test_reach_dd_writes_outputs(tmp_path):
    out = str(tmp_path / "dd")
    assert run(["reach", "--method", "dd", "--out", out]) == 0
    manifest = json.load(open(os.path.join(out, "manifest.json")))
    assert manifest["method"] == "dd"
    assert manifest["mult_count"] == manifest["config"]["K"] * manifest["config"]["Ns"]
    assert os.path.exists(os.path.join(out, "dd_chain.csv"))
    assert os.path.exists(os.path.join(out, "dd_chain.json"))


def test_reach_ira_writes_anchors(tmp_path):
    out = str(tmp_path / "ira")
    assert run(["reach", "--method", "ira", "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "anchors.json"))
    manifest = json.load(open(os.path.join(out, "manifest.json")))
    K, Ns = manifest["config"]["K"], manifest["config"]["Ns"]
    assert manifest["mult_count"] == K + K * (Ns - 1)


def test_reach_mb_invariance_gap(tmp_path):
    out = str(tmp_path / "mb")
    assert run(["reach", "--method", "mb", "--out", out]) == 0
    manifest = json.load(open(os.path.join(out, "manifest.json")))
    assert manifest["step_size_invariance_gap"] < 1e-8


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"delta_c": 0.2}))
    assert run(["reach", "--method", "dd", "--config", str(bad),
                "--out", str(tmp_path / "o")]) == cli.EXIT_CONFIG


def test_unknown_config_field_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nope": 1}))
    assert run(["reach", "--method", "dd", "--config", str(bad),
                "--out", str(tmp_path / "o")]) == cli.EXIT_CONFIG


def test_rank_failure_exit_code(tmp_path):
    bad = tmp_path / "tiny.json"
    # 7 fine steps leave only 2 coarse columns, short of full row rank
    bad.write_text(json.dumps({"T": 7}))
    assert run(["reach", "--method", "dd", "--config", str(bad),
                "--out", str(tmp_path / "o")]) == cli.EXIT_RANK


def test_predictor_unavailable_exit_code(tmp_path):
    assert run(["reach", "--method", "ta-ira",
                "--out", str(tmp_path / "o")]) == cli.EXIT_PREDICTOR


def test_sweep_csv(tmp_path):
    out = str(tmp_path / "sweep")
    assert run(["sweep", "--K-range", "2", "--Ns-range", "2:3",
                "--out", out]) == 0
    lines = open(os.path.join(out, "sweep.csv")).read().strip().splitlines()
    assert lines[0].startswith("K,Ns,")
    assert len(lines) == 3


def test_sensitivity_output(tmp_path):
    out = str(tmp_path / "sens")
    assert run(["sensitivity", "--out", out]) == 0
    doc = json.load(open(os.path.join(out, "sensitivity.json")))
    assert doc["flagged"] is True
    assert doc["rel_gap"] > 1e-3


def test_export_training_split(tmp_path):
    out = str(tmp_path / "exp")
    assert run(["export-training", "--chains", "8", "--out", out]) == 0
    train = open(os.path.join(out, "train.jsonl")).read().strip().splitlines()
    holdout = open(os.path.join(out, "holdout.jsonl")).read().strip().splitlines()
    assert len(train) + len(holdout) == 8
    rec = json.loads(train[0])
    assert "pairs" in rec
    pair = rec["pairs"][0]
    assert set(pair) >= {"current", "endpoint", "target"}
