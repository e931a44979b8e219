"""Ground-truth LTI system, discretization, and trajectory data assembly."""

import numpy as np

from .setcalc import Zonotope, linear_map, minkowski_sum

RANK_RTOL = 1e-10


class ContinuousSystem:
    """dx/dt = A_c x + B_c u + w with noise intensity sigma_w."""

    __slots__ = ("A_c", "B_c", "sigma_w")

    def __init__(self, A_c, B_c, sigma_w):
        A_c = np.atleast_2d(np.asarray(A_c, dtype=float))
        B_c = np.asarray(B_c, dtype=float)
        if B_c.ndim == 1:
            B_c = B_c[:, None]
        n = A_c.shape[0]
        if A_c.shape != (n, n) or B_c.shape[0] != n:
            raise ValueError("inconsistent system shapes")
        if np.linalg.matrix_rank(A_c) < n:
            raise ValueError("A_c must be invertible")
        self.A_c = A_c
        self.B_c = B_c
        self.sigma_w = float(sigma_w)

    @property
    def n(self):
        return self.A_c.shape[0]

    @property
    def m(self):
        return self.B_c.shape[1]


class DiscreteSystem:
    """x_k = A x_{k-1} + B u_{k-1} + w_k with disturbance set Z_w."""

    __slots__ = ("A", "B", "delta", "Z_w")

    def __init__(self, A, B, delta, Z_w):
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.asarray(B, dtype=float)
        self.B = B[:, None] if B.ndim == 1 else B
        if delta <= 0:
            raise ValueError("step size must be positive")
        self.delta = float(delta)
        self.Z_w = Z_w

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]


class DataMatrices:
    """Single-trajectory data: successors X_plus, states X_minus, inputs U_minus."""

    __slots__ = ("X_plus", "X_minus", "U_minus")

    def __init__(self, X_plus, X_minus, U_minus):
        X_plus = np.atleast_2d(np.asarray(X_plus, dtype=float))
        X_minus = np.atleast_2d(np.asarray(X_minus, dtype=float))
        U_minus = np.atleast_2d(np.asarray(U_minus, dtype=float))
        if not (X_plus.shape[1] == X_minus.shape[1] == U_minus.shape[1]):
            raise ValueError("column counts differ")
        if X_plus.shape[0] != X_minus.shape[0]:
            raise ValueError("state dimensions differ")
        self.X_plus = X_plus
        self.X_minus = X_minus
        self.U_minus = U_minus

    @property
    def D_minus(self):
        return np.vstack([self.X_minus, self.U_minus])

    @property
    def T(self):
        return self.X_plus.shape[1]


def _expm(A, rtol=1e-12):
    """Matrix exponential by scaling-and-squaring on the truncated series."""
    A = np.asarray(A, dtype=float)
    norm = np.linalg.norm(A, 1)
    s = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0 else 0
    As = A / (2 ** s)
    n = A.shape[0]
    result = np.eye(n)
    term = np.eye(n)
    k = 1
    while True:
        term = term @ As / k
        result = result + term
        if np.linalg.norm(term, 1) <= rtol * np.linalg.norm(result, 1):
            break
        k += 1
        if k > 200:
            raise RuntimeError("matrix exponential series did not converge")
    for _ in range(s):
        result = result @ result
    return result


def discretize(sys, delta, noise_mode="direct"):
    """Zero-order-hold discretization at step ``delta``.

    A = exp(A_c delta), B = B_w(delta) B_c with
    B_w(delta) = A_c^{-1} (exp(A_c delta) - I). The per-step disturbance
    set is <0, sigma_w * I> in "direct" mode (sigma_w read as the discrete
    per-step bound) or <0, sigma_w * B_w(delta)> in "integrated" mode
    (sigma_w read as a continuous-time intensity).
    """
    if delta <= 0:
        raise ValueError("step size must be positive")
    A = _expm(sys.A_c * delta)
    B_w = np.linalg.solve(sys.A_c, A - np.eye(sys.n))
    B = B_w @ sys.B_c
    if noise_mode == "direct":
        Z_w = Zonotope(np.zeros(sys.n), sys.sigma_w * np.eye(sys.n))
    elif noise_mode == "integrated":
        Z_w = Zonotope(np.zeros(sys.n), sys.sigma_w * B_w)
    else:
        raise ValueError("noise_mode must be 'direct' or 'integrated'")
    return DiscreteSystem(A, B, delta, Z_w)


def simulate(dsys, x0, inputs, noises):
    """Iterate the recursion; returns states x_0 .. x_T as rows (T+1, n)."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    noises = np.atleast_2d(np.asarray(noises, dtype=float))
    if inputs.shape[0] != noises.shape[0]:
        raise ValueError("input/noise sequence lengths differ")
    x = np.asarray(x0, dtype=float)
    if x.shape != (dsys.n,):
        raise ValueError("initial state dimension mismatch")
    states = [x]
    for u, w in zip(inputs, noises):
        x = dsys.A @ x + dsys.B @ u + w
        states.append(x)
    return np.array(states)


def collect_data(dsys, T, x0, input_set, rng_seed, hold=1):
    """Collect one trajectory of length T+1 into data matrices.

    Inputs are drawn uniformly from ``input_set`` and held constant over
    blocks of ``hold`` steps (zero-order hold at the coarse rate); noises
    are drawn uniformly from the disturbance set.
    """
    if T < dsys.n + dsys.m:
        raise ValueError("trajectory too short for identifiability")
    rng = np.random.default_rng(rng_seed)
    n_blocks = -(-T // hold)
    block_inputs = input_set.sample(n_blocks, rng)
    inputs = np.repeat(block_inputs, hold, axis=0)[:T]
    noises = dsys.Z_w.sample(T, rng)
    states = simulate(dsys, x0, inputs, noises)
    return DataMatrices(states[1:].T, states[:-1].T, inputs.T)


def subsample_coarse(fine, Ns):
    """Coarse-rate data: every Ns-th state paired with the state Ns later."""
    if Ns < 2:
        raise ValueError("Ns must be >= 2")
    T = fine.T
    cols = T // Ns
    if cols < 2:
        raise ValueError("too few columns for coarse subsampling")
    starts = np.arange(cols) * Ns
    X_minus = fine.X_minus[:, starts]
    # Successor Ns steps later = X_plus at the interval's last fine step.
    X_plus = fine.X_plus[:, starts + Ns - 1]
    U_minus = fine.U_minus[:, starts]
    return DataMatrices(X_plus, X_minus, U_minus)


def check_rank(D_minus):
    """Numerical full-row-rank test (singular values above 1e-10 * sigma_max)."""
    D_minus = np.atleast_2d(np.asarray(D_minus, dtype=float))
    sv = np.linalg.svd(D_minus, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return False
    return bool(np.sum(sv > RANK_RTOL * sv[0]) == D_minus.shape[0])


def exact_coarse_noise(A_f, Z_w_f, Ns):
    """Minkowski sum of A_f^i Z_w_f for i = 0 .. Ns-1 (oracle, exact)."""
    if Ns < 1:
        raise ValueError("Ns must be >= 1")
    A_f = np.atleast_2d(np.asarray(A_f, dtype=float))
    acc = Z_w_f
    power = np.eye(A_f.shape[0])
    for _ in range(1, Ns):
        power = A_f @ power
        acc = minkowski_sum(acc, linear_map(power, Z_w_f))
    return acc
