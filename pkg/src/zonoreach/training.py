"""Augmented-chain generation: training pairs and calibration instances.

Each augmented initial set yields one fine chain; consecutive chain sets
become autoregressive (current, endpoint) -> target pairs, and simulated
trajectories from the same set feed conformal calibration.
"""

import numpy as np

from .setcalc import Zonotope, interval_hull
from .conformal import CalibrationInstance
from .predictor_client import to_token_grid
from . import reach, sysdata


def random_rotation(n, rng):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def augment_initial_set(base, rng):
    """Random translation (hull-scale), generator scaling in [0.5, 1.5], rotation."""
    hull = interval_hull(base)
    shift = rng.uniform(-0.5, 0.5, size=base.dim) * hull.width
    scale = rng.uniform(0.5, 1.5)
    rot = random_rotation(base.dim, rng)
    return Zonotope(base.center + shift, scale * (rot @ base.generators))


def fine_chain_sets(fine_model, X0, U, Zw_f, K, Ns, rho):
    cfg = reach.ChainConfig(K, Ns, rho, U)
    return reach.run_fine_chain(cfg, fine_model, X0, Zw_f).sets


def make_instance(dsys, fine_model, X0, U, Zw_f, Ns, n_traj, rng, rho=4):
    """One-interval calibration instance from the given initial set.

    The endpoint is the fine-chain set after Ns steps; states are true
    trajectories sampled from X0 under uniform inputs and noises.
    """
    sets = fine_chain_sets(fine_model, X0, U, Zw_f, 1, Ns, rho)
    starts = X0.sample(n_traj, rng)
    states = np.empty((n_traj, Ns + 1, X0.dim))
    for i in range(n_traj):
        inputs = U.sample(Ns, rng)
        noises = Zw_f.sample(Ns, rng)
        states[i] = sysdata.simulate(dsys, starts[i], inputs, noises)
    per_substep = [states[:, j, :] for j in range(1, Ns)]
    return CalibrationInstance(X0, sets[Ns], Ns, per_substep)


def generate_instances(dsys, fine_model, base_X0, U, Zw_f, Ns, count, n_traj,
                       seed, rho=4):
    rng = np.random.default_rng(seed)
    return [
        make_instance(dsys, fine_model, augment_initial_set(base_X0, rng),
                      U, Zw_f, Ns, n_traj, rng, rho)
        for _ in range(count)
    ]


def chain_to_pairs(sets, K, Ns, kappa):
    """K(Ns-1) autoregressive pairs from one fine chain of K*Ns steps.

    Time fractions are interval-relative, matching the inference protocol.
    """
    pairs = []
    for k in range(K):
        endpoint = sets[(k + 1) * Ns]
        end_grid = to_token_grid(endpoint, 1.0, kappa)
        for j in range(1, Ns):
            cur = sets[k * Ns + j - 1]
            target = sets[k * Ns + j]
            pairs.append({
                "current": to_token_grid(cur, (j - 1) / Ns, kappa).tolist(),
                "endpoint": end_grid.tolist(),
                "target": to_token_grid(target, j / Ns, kappa).tolist(),
                "j": j,
                "Ns": Ns,
            })
    return pairs


def generate_training_records(dsys, fine_model, base_X0, U, Zw_f, K, Ns,
                              n_chains, n_traj, seed, rho=4):
    """Augmented chains -> training pairs plus per-chain trajectory states."""
    rng = np.random.default_rng(seed)
    kappa = rho * base_X0.dim
    records = []
    for chain_idx in range(n_chains):
        X0 = augment_initial_set(base_X0, rng)
        sets = fine_chain_sets(fine_model, X0, U, Zw_f, K, Ns, rho)
        starts = X0.sample(n_traj, rng)
        states = np.empty((n_traj, K * Ns + 1, X0.dim))
        for i in range(n_traj):
            inputs = U.sample(K * Ns, rng)
            noises = Zw_f.sample(K * Ns, rng)
            states[i] = sysdata.simulate(dsys, starts[i], inputs, noises)
        records.append({
            "chain": chain_idx,
            "pairs": chain_to_pairs(sets, K, Ns, kappa),
            "trajectories": states.tolist(),
        })
    return records
