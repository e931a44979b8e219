"""Token grids: a zonotope as a (kappa + 1, n + 1) real array.

Row 0 is the center, rows 1..kappa the generators (zero-padded), and the
last column carries the time fraction tau. The layout matches the wire
format of the prediction protocol, so grids read from requests or
training files can be used directly.
"""

import numpy as np


def tokenize(center, generators, tau, kappa):
    center = np.asarray(center, dtype=float)
    generators = np.asarray(generators, dtype=float)
    n = center.shape[0]
    order = generators.shape[1] if generators.size else 0
    if order > kappa:
        raise ValueError(f"{order} generators exceed kappa={kappa}")
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    grid = np.zeros((kappa + 1, n + 1))
    grid[0, :n] = center
    if order:
        grid[1:order + 1, :n] = generators.T
    grid[:, n] = tau
    return grid


def detokenize(grid):
    grid = np.asarray(grid, dtype=float)
    n = grid.shape[1] - 1
    return grid[0, :n].copy(), grid[1:, :n].T.copy()


def grid_tau(grid):
    return float(np.asarray(grid)[0, -1])
