"""Training-file loading and token normalization.

Training files are newline-delimited JSON chain records, each with a
"pairs" list of {current, endpoint, target, j, Ns} token grids and a
"trajectories" array of simulated states kept for calibration.
"""

import json

import numpy as np


def load_records(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def records_to_arrays(records, limit=None):
    """Flatten chain records into (current, endpoint, target, j) arrays."""
    cur, end, tgt, steps = [], [], [], []
    for rec in records:
        for pair in rec["pairs"]:
            cur.append(pair["current"])
            end.append(pair["endpoint"])
            tgt.append(pair["target"])
            steps.append(pair["j"])
            if limit and len(cur) >= limit:
                break
        if limit and len(cur) >= limit:
            break
    return (np.array(cur), np.array(end), np.array(tgt),
            np.array(steps, dtype=np.int64))


class Normalizer:
    """Per-column affine normalization fit on the training grids.

    The tau column is left untouched; it is already in [0, 1].
    """

    def __init__(self, mean, std):
        self.mean = np.asarray(mean, dtype=float)
        self.std = np.asarray(std, dtype=float)

    @classmethod
    def fit(cls, grids):
        grids = np.asarray(grids)
        flat = grids.reshape(-1, grids.shape[-1])
        mean = flat.mean(axis=0)
        std = flat.std(axis=0)
        std[std < 1e-12] = 1.0
        mean[-1] = 0.0
        std[-1] = 1.0
        return cls(mean, std)

    def encode(self, grids):
        return (np.asarray(grids) - self.mean) / self.std

    def decode(self, grids):
        return np.asarray(grids) * self.std + self.mean

    def to_dict(self):
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["mean"], doc["std"])
