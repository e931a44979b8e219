"""Desk-scale acceptance gate for the learned predictor.

The trained surrogate must track the fine data-driven chain within 15%
mean hull-width error on held-out chains, keep conformalized coverage at
or above 0.93 for delta = 0.05, and show flat per-substep latency across
input zonotope orders. The speed gate compares the surrogate-driven run
against the exact interpolated run end to end.
"""

import csv
import json
import statistics
import sys
import time

import numpy as np

from zonopredict import Predictor, tokenize

from conftest import run_harness


def hull_widths(grid):
    body = np.asarray(grid)[:, :-1]
    return 2.0 * np.abs(body[1:]).sum(axis=0)


def test_width_error_on_holdout(desk_artifact, holdout_records):
    predictor = Predictor(str(desk_artifact))
    errors = []
    for record in holdout_records:
        pairs = record["pairs"]
        k = 0
        while k < len(pairs):
            Ns = pairs[k]["Ns"]
            interval = pairs[k:k + Ns - 1]
            preds = predictor.predict_autoregressive(
                np.asarray(interval[0]["current"]),
                np.asarray(interval[0]["endpoint"]), Ns)
            for pred, pair in zip(preds, interval):
                truth = hull_widths(pair["target"])
                errors.append(np.mean(np.abs(hull_widths(pred) - truth)
                                      / np.maximum(truth, 1e-12)))
            k += Ns - 1
    assert float(np.mean(errors)) < 0.15


def test_conformal_coverage(desk_artifact, tmp_path):
    serve_cmd = f"{sys.executable} -m zonopredict.cli serve {desk_artifact}"
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"predictor_cmd": serve_cmd}))
    out = tmp_path / "cal"
    proc = run_harness(["calibrate", "--config", str(cfg_file),
                        "--out", str(out)], cwd=str(tmp_path))
    assert proc.returncode == 0, proc.stderr
    manifest = json.load(open(out / "manifest.json"))
    assert manifest["coverage"] >= 0.93
    assert manifest["q_hat"] >= 0.0


def test_latency_flat_across_input_orders(desk_artifact):
    predictor = Predictor(str(desk_artifact))
    cfg = predictor.cfg
    rng = np.random.default_rng(0)
    endpoint = tokenize(rng.normal(size=cfg.n),
                        0.1 * rng.normal(size=(cfg.n, cfg.kappa)), 1.0,
                        cfg.kappa)

    def median_latency(order):
        grid = tokenize(rng.normal(size=cfg.n),
                        0.1 * rng.normal(size=(cfg.n, order)), 0.0,
                        cfg.kappa)
        predictor.predict_grid(grid, endpoint, 1, 3)
        samples = []
        for _ in range(30):
            t0 = time.perf_counter()
            predictor.predict_grid(grid, endpoint, 1, 3)
            samples.append(time.perf_counter() - t0)
        return statistics.median(samples)

    t1 = median_latency(1)
    t10 = median_latency(10)
    ratio = max(t1, t10) / min(t1, t10)
    assert ratio <= 1.2, f"latency ratio {ratio:.2f}"


def test_faster_than_exact_interpolation(desk_artifact, tmp_path):
    """The surrogate run must beat the exact run's interpolation phase.

    The exact end-to-end time is an upper bound on its interpolation
    phase alone, so failing against the end-to-end time is a definite
    failure of the stricter gate.
    """
    serve_cmd = f"{sys.executable} -m zonopredict.cli serve {desk_artifact}"
    cal_out = tmp_path / "cal"
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"predictor_cmd": serve_cmd}))
    proc = run_harness(["calibrate", "--config", str(cfg_file),
                        "--out", str(cal_out)], cwd=str(tmp_path))
    assert proc.returncode == 0, proc.stderr
    cfg_file.write_text(json.dumps({
        "predictor_cmd": serve_cmd,
        "calibration_file": str(cal_out / "calibration.json")}))
    abl_out = tmp_path / "abl"
    proc = run_harness(["ablation", "--config", str(cfg_file),
                        "--out", str(abl_out)], cwd=str(tmp_path))
    assert proc.returncode == 0, proc.stderr
    rows = {r["variant"]: r
            for r in csv.DictReader(open(abl_out / "ablation.csv"))}
    t_exact = float(rows["IRA-seq"]["runtime_ms"])
    t_surrogate = float(rows["TA-IRA-conformal"]["runtime_ms"])
    assert t_surrogate < t_exact, (
        f"surrogate run {t_surrogate:.2f} ms vs exact {t_exact:.2f} ms")
