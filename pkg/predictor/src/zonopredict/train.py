"""Training loop: mean squared error between predicted and target grids.

The artifact is a directory holding the checkpoint, the configuration,
the normalization statistics, a loss curve, and a manifest with the seed
and a hash of the training data.
"""

import hashlib
import json
import os

import numpy as np
import torch

from .data import Normalizer, load_records, records_to_arrays
from .model import SetPredictorModel, SurrogateConfig


def _data_hash(arrays):
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()[:16]


def train(cfg, records, out_dir, log=print):
    cur, end, tgt, steps = records_to_arrays(records, limit=cfg.samples)
    if cur.size == 0:
        raise ValueError("no training pairs")
    norm = Normalizer.fit(np.concatenate([cur, end, tgt]))
    cur_t = torch.tensor(norm.encode(cur), dtype=torch.float32)
    end_t = torch.tensor(norm.encode(end), dtype=torch.float32)
    tgt_t = torch.tensor(norm.encode(tgt), dtype=torch.float32)
    j_t = torch.tensor(steps)

    torch.manual_seed(cfg.seed)
    model = SetPredictorModel(cfg)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    n = cur_t.shape[0]
    losses = []
    rng = np.random.default_rng(cfg.seed)
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        total = 0.0
        for lo in range(0, n, cfg.batch_size):
            idx = order[lo:lo + cfg.batch_size]
            opt.zero_grad()
            pred = model(cur_t[idx], end_t[idx], j_t[idx])
            loss = torch.mean((pred - tgt_t[idx]) ** 2)
            if not torch.isfinite(loss):
                raise RuntimeError(
                    f"training diverged: loss {loss.item()} at epoch {epoch}")
            loss.backward()
            opt.step()
            total += loss.item() * len(idx)
        losses.append(total / n)
        if epoch % 20 == 0 or epoch == cfg.epochs - 1:
            log(f"epoch {epoch:4d}  loss {losses[-1]:.6f}")

    os.makedirs(out_dir, exist_ok=True)
    torch.save(model.state_dict(), os.path.join(out_dir, "checkpoint.pt"))
    with open(os.path.join(out_dir, "config.json"), "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=1)
    with open(os.path.join(out_dir, "normalization.json"), "w") as fh:
        json.dump(norm.to_dict(), fh, indent=1)
    with open(os.path.join(out_dir, "loss_curve.csv"), "w") as fh:
        fh.write("epoch,loss\n")
        fh.writelines(f"{i},{v!r}\n" for i, v in enumerate(losses))
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump({"seed": cfg.seed, "pairs": int(n),
                   "data_hash": _data_hash([cur, end, tgt, steps]),
                   "final_loss": losses[-1]}, fh, indent=1)
    return losses


def train_from_file(cfg, train_path, out_dir, log=print):
    return train(cfg, load_records(train_path), out_dir, log=log)
