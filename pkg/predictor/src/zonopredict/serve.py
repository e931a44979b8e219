"""Newline-delimited JSON prediction server on stdin/stdout.

Requests: {id, op: "ping"} or {id, kappa, n, current, endpoint, j, Ns}.
Responses: {id, ok: true}, {id, prediction}, or {id, error}; one response
per request, in order. Malformed requests produce an error record and
the process keeps serving.
"""

import json
import sys

import numpy as np

from .infer import Predictor


def handle(predictor, req):
    if req.get("op") == "ping":
        return {"id": req.get("id"), "ok": True}
    rows = predictor.cfg.rows
    cols = predictor.cfg.d_tok
    if req.get("kappa") != predictor.cfg.kappa or req.get("n") != predictor.cfg.n:
        return {"id": req.get("id"),
                "error": f"model expects kappa={predictor.cfg.kappa}, "
                         f"n={predictor.cfg.n}"}
    current = np.asarray(req["current"], dtype=float)
    endpoint = np.asarray(req["endpoint"], dtype=float)
    if current.shape != (rows, cols) or endpoint.shape != (rows, cols):
        return {"id": req.get("id"),
                "error": f"grids must have shape ({rows}, {cols})"}
    grid = predictor.predict_grid(current, endpoint, int(req["j"]),
                                  int(req["Ns"]))
    return {"id": req.get("id"), "prediction": grid.tolist()}


def serve(artifact_dir, stdin=None, stdout=None):
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    predictor = Predictor(artifact_dir)
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
            resp = handle(predictor, req)
        except Exception as exc:  # malformed input must not kill the server
            req_id = None
            try:
                req_id = json.loads(line).get("id")
            except Exception:
                pass
            resp = {"id": req_id, "error": str(exc)}
        stdout.write(json.dumps(resp) + "\n")
        stdout.flush()
