"""Artifact loading and deterministic inference."""

import json
import os

import numpy as np
import torch

from .data import Normalizer
from .grids import tokenize
from .model import SetPredictorModel, SurrogateConfig


class Predictor:
    def __init__(self, artifact_dir):
        with open(os.path.join(artifact_dir, "config.json")) as fh:
            self.cfg = SurrogateConfig(**json.load(fh))
        with open(os.path.join(artifact_dir, "normalization.json")) as fh:
            self.norm = Normalizer.from_dict(json.load(fh))
        self.model = SetPredictorModel(self.cfg)
        state = torch.load(os.path.join(artifact_dir, "checkpoint.pt"),
                           map_location="cpu", weights_only=True)
        self.model.load_state_dict(state)
        self.model.eval()

    @torch.no_grad()
    def predict_grid(self, current, endpoint, j, Ns):
        """One substep: predicted (rows, d_tok) grid with tau = j / Ns."""
        cur = torch.tensor(self.norm.encode(current),
                           dtype=torch.float32).unsqueeze(0)
        end = torch.tensor(self.norm.encode(endpoint),
                           dtype=torch.float32).unsqueeze(0)
        out = self.model(cur, end, torch.tensor([j]))
        grid = self.norm.decode(out[0].numpy())
        grid[:, -1] = j / Ns
        return grid

    def predict_autoregressive(self, anchor_grid, endpoint_grid, Ns):
        """Substeps j = 1 .. Ns-1, each conditioned on its predecessor."""
        out = []
        current = anchor_grid
        for j in range(1, Ns):
            current = self.predict_grid(current, endpoint_grid, j, Ns)
            out.append(current)
        return out
