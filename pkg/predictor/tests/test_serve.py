import json
import subprocess
import sys

import numpy as np
import pytest

from zonopredict import Predictor


@pytest.fixture(scope="module")
def server(tiny_artifact):
    proc = subprocess.Popen(
        [sys.executable, "-m", "zonopredict.cli", "serve",
         str(tiny_artifact)],
        stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, bufsize=1)
    yield proc
    proc.stdin.close()
    proc.wait(timeout=10)


def ask(proc, req):
    proc.stdin.write(json.dumps(req) + "\n")
    proc.stdin.flush()
    return json.loads(proc.stdout.readline())


def grid(rows, cols, tau):
    g = np.zeros((rows, cols))
    g[:, -1] = tau
    return g.tolist()


def test_ping(server):
    assert ask(server, {"id": 1, "op": "ping"}) == {"id": 1, "ok": True}


def test_predict_round_trip(tiny_artifact, server):
    cfg = Predictor(str(tiny_artifact)).cfg
    resp = ask(server, {"id": 2, "kappa": cfg.kappa, "n": cfg.n,
                        "current": grid(cfg.rows, cfg.d_tok, 0.0),
                        "endpoint": grid(cfg.rows, cfg.d_tok, 1.0),
                        "j": 1, "Ns": 3})
    pred = np.array(resp["prediction"])
    assert resp["id"] == 2
    assert pred.shape == (cfg.rows, cfg.d_tok)
    assert np.all(np.isfinite(pred))
    assert np.allclose(pred[:, -1], 1 / 3)


def test_kappa_mismatch_is_structured_error(tiny_artifact, server):
    cfg = Predictor(str(tiny_artifact)).cfg
    resp = ask(server, {"id": 3, "kappa": cfg.kappa + 1, "n": cfg.n,
                        "current": grid(cfg.rows, cfg.d_tok, 0.0),
                        "endpoint": grid(cfg.rows, cfg.d_tok, 1.0),
                        "j": 1, "Ns": 3})
    assert resp["id"] == 3 and "error" in resp


def test_malformed_request_keeps_serving(server):
    server.stdin.write("{not json\n")
    server.stdin.flush()
    resp = json.loads(server.stdout.readline())
    assert "error" in resp
    assert ask(server, {"id": 4, "op": "ping"})["ok"] is True


def test_batch_in_order(tiny_artifact, server):
    cfg = Predictor(str(tiny_artifact)).cfg
    n_req = 4  # one benchmark run's worth: K(Ns - 1) requests
    for i in range(n_req):
        server.stdin.write(json.dumps(
            {"id": 10 + i, "kappa": cfg.kappa, "n": cfg.n,
             "current": grid(cfg.rows, cfg.d_tok, 0.0),
             "endpoint": grid(cfg.rows, cfg.d_tok, 1.0),
             "j": 1 + i % 2, "Ns": 3}) + "\n")
    server.stdin.flush()
    ids = [json.loads(server.stdout.readline())["id"] for _ in range(n_req)]
    assert ids == [10, 11, 12, 13]


def test_deterministic_inference(tiny_artifact):
    predictor = Predictor(str(tiny_artifact))
    rng = np.random.default_rng(0)
    cur = rng.normal(size=(predictor.cfg.rows, predictor.cfg.d_tok))
    end = rng.normal(size=(predictor.cfg.rows, predictor.cfg.d_tok))
    a = predictor.predict_grid(cur, end, 1, 3)
    b = predictor.predict_grid(cur, end, 1, 3)
    assert np.array_equal(a, b)
