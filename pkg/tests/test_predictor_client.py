import os
import sys

import numpy as np
import pytest

from zonoreach.predictor_client import (PredictorUnavailable, StreamPredictor,
                                        from_token_grid, to_token_grid)
from zonoreach.setcalc import Zonotope

FAKE = f"{sys.executable} {os.path.join(os.path.dirname(__file__), 'fake_predictor.py')}"


def test_token_grid_round_trip(rng):
    Z = Zonotope(rng.normal(size=3), rng.normal(size=(3, 5)))
    grid = to_token_grid(Z, 0.5, kappa=8)
    assert grid.shape == (9, 4)
    assert np.all(grid[:, 3] == 0.5)
    back = from_token_grid(grid)
    assert np.array_equal(back.center, Z.center)
    assert np.array_equal(back.generators[:, :5], Z.generators)
    assert not back.generators[:, 5:].any()


def test_token_grid_reduces_oversized(rng):
    Z = Zonotope(rng.normal(size=2), rng.normal(size=(2, 30)))
    grid = to_token_grid(Z, 0.0, kappa=8)
    assert grid.shape == (9, 3)


def test_stream_predictor_round_trip(rng):
    cur = Zonotope(rng.normal(size=3), 0.1 * rng.normal(size=(3, 2)))
    end = Zonotope(rng.normal(size=3), 0.1 * rng.normal(size=(3, 2)))
    with StreamPredictor(FAKE, kappa=8, n=3) as predictor:
        out = predictor.predict(cur, end, j=1, Ns=3)
    # the fake echoes the endpoint grid back
    assert np.allclose(out.center, end.center)
    assert np.allclose(out.generators[:, :2], end.generators)


def test_stream_predictor_missing_command():
    with pytest.raises(PredictorUnavailable):
        StreamPredictor("/does/not/exist", kappa=8, n=3)


def test_stream_predictor_dead_server():
    with pytest.raises(PredictorUnavailable):
        StreamPredictor(f"{sys.executable} -c 'pass'", kappa=8, n=3)
