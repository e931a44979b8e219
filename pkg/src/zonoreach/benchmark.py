"""The five-dimensional benchmark system and one-stop experiment setup."""

import numpy as np

from .setcalc import Zonotope
from . import sysdata, ddmodel

A_C = np.block([
    [np.array([[-1.0, -4.0], [4.0, -1.0]]), np.zeros((2, 3))],
    [np.zeros((2, 2)), np.array([[-3.0, 1.0], [-1.0, -3.0]]), np.zeros((2, 1))],
    [np.zeros((1, 4)), np.array([[-2.0]])],
])
B_C = np.ones((5, 1))
SIGMA_W = 0.005
DELTA_F = 0.05
T_DATA = 150

X0 = Zonotope(np.ones(5), 0.1 * np.eye(5))
U_SET = Zonotope(np.array([10.0]), np.array([[0.25]]))


def continuous_system():
    return sysdata.ContinuousSystem(A_C, B_C, SIGMA_W)


class BenchmarkSetup:
    """Everything a benchmark run needs: systems, data, identified models."""

    __slots__ = ("csys", "fine", "coarse", "fine_data", "coarse_data",
                 "fine_model", "coarse_model", "Ns", "seed", "X0", "U")

    def __init__(self, csys, fine, coarse, fine_data, coarse_data,
                 fine_model, coarse_model, Ns, seed):
        self.csys = csys
        self.fine = fine
        self.coarse = coarse
        self.fine_data = fine_data
        self.coarse_data = coarse_data
        self.fine_model = fine_model
        self.coarse_model = coarse_model
        self.Ns = Ns
        self.seed = seed
        self.X0 = X0
        self.U = U_SET


DEFAULT_SEED = 5


def build(Ns=3, T=T_DATA, seed=DEFAULT_SEED, delta_f=DELTA_F, x0=None,
          input_set=None):
    """Discretize, collect one trajectory, identify both model sets.

    The coarse system's per-step disturbance bound is the exact unrolling
    of the fine bound through the powers of A_f, which is what actually
    bounds the subsampled transitions; only anchor propagation falls back
    to the data-driven estimate. Raises if either resolution's data loses
    full row rank.
    """
    csys = continuous_system()
    fine = sysdata.discretize(csys, delta_f)
    coarse = sysdata.discretize(csys, Ns * delta_f)
    coarse.Z_w = sysdata.exact_coarse_noise(fine.A, fine.Z_w, Ns)
    u_set = U_SET if input_set is None else input_set
    start = np.ones(csys.n) if x0 is None else x0
    fine_data = sysdata.collect_data(fine, T, start, u_set, seed, hold=Ns)
    coarse_data = sysdata.subsample_coarse(fine_data, Ns)
    for name, data in (("fine", fine_data), ("coarse", coarse_data)):
        if not sysdata.check_rank(data.D_minus):
            raise RuntimeError(f"rank check failed at the {name} resolution")
    fine_model = ddmodel.build_model_set(fine_data, fine.Z_w, "fine",
                                         fine.delta)
    coarse_model = ddmodel.build_model_set(coarse_data, coarse.Z_w, "coarse",
                                           coarse.delta)
    return BenchmarkSetup(csys, fine, coarse, fine_data, coarse_data,
                          fine_model, coarse_model, Ns, seed)


def monte_carlo_states(setup, n_traj, n_steps, seed=1):
    """True-system fine-step trajectories from X0; returns (n_traj, n_steps+1, n)."""
    rng = np.random.default_rng(seed)
    starts = setup.X0.sample(n_traj, rng)
    out = np.empty((n_traj, n_steps + 1, setup.csys.n))
    for i in range(n_traj):
        inputs = setup.U.sample(n_steps, rng)
        noises = setup.fine.Z_w.sample(n_steps, rng)
        out[i] = sysdata.simulate(setup.fine, starts[i], inputs, noises)
    return out
