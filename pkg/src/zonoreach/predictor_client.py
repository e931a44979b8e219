"""Client side of the set-prediction protocol.

Requests and responses are newline-delimited JSON over a spawned
process's standard input/output. Zonotopes travel as token grids:
rows [center, g_1 .. g_kappa], each row augmented with an
interval-relative time fraction.
"""

import json
import shlex
import subprocess
import threading

import numpy as np

from .setcalc import Zonotope, reduce_order


class PredictorUnavailable(RuntimeError):
    pass


def to_token_grid(Z, tau, kappa):
    """(kappa + 1, n + 1) grid; generators padded with zeros up to kappa."""
    if Z.order > kappa:
        Z = reduce_order(Z, max(1, kappa // Z.dim))
    if Z.order > kappa:
        raise ValueError(f"cannot fit {Z.order} generators into kappa={kappa}")
    n = Z.dim
    grid = np.zeros((kappa + 1, n + 1))
    grid[0, :n] = Z.center
    grid[1:Z.order + 1, :n] = Z.generators.T
    grid[:, n] = tau
    return grid


def from_token_grid(grid):
    grid = np.asarray(grid, dtype=float)
    n = grid.shape[1] - 1
    return Zonotope(grid[0, :n], grid[1:, :n].T)


class StreamPredictor:
    """Spawns a serve process and runs the request/response protocol.

    Implements predict(current, endpoint, j, Ns); deterministic because the
    server runs inference in evaluation mode.
    """

    def __init__(self, command, kappa, n):
        self.kappa = kappa
        self.n = n
        self._next_id = 0
        # one request/response round trip at a time; parallel interval
        # workers share this client
        self._lock = threading.Lock()
        try:
            self._proc = subprocess.Popen(
                shlex.split(command), stdin=subprocess.PIPE,
                stdout=subprocess.PIPE, text=True, bufsize=1)
        except OSError as exc:
            raise PredictorUnavailable(str(exc)) from exc
        self.ping()

    def _roundtrip(self, request):
        with self._lock:
            if self._proc.poll() is not None:
                raise PredictorUnavailable("predictor process exited")
            self._proc.stdin.write(json.dumps(request) + "\n")
            self._proc.stdin.flush()
            line = self._proc.stdout.readline()
        if not line:
            raise PredictorUnavailable("predictor closed its output stream")
        response = json.loads(line)
        if response.get("id") != request["id"]:
            raise RuntimeError("predictor response out of order")
        if "error" in response:
            raise RuntimeError(f"predictor error: {response['error']}")
        return response

    def _take_id(self):
        with self._lock:
            self._next_id += 1
            return self._next_id

    def ping(self):
        resp = self._roundtrip({"id": self._take_id(), "op": "ping"})
        if resp.get("ok") is not True:
            raise PredictorUnavailable("predictor failed the health check")

    def predict(self, current, endpoint, j, Ns):
        request = {
            "id": self._take_id(),
            "kappa": self.kappa,
            "n": self.n,
            "current": to_token_grid(current, (j - 1) / Ns, self.kappa).tolist(),
            "endpoint": to_token_grid(endpoint, 1.0, self.kappa).tolist(),
            "j": j,
            "Ns": Ns,
        }
        response = self._roundtrip(request)
        return from_token_grid(response["prediction"])

    def close(self):
        if self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=10)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
