"""Data-driven identification of the set of data-consistent system matrices.

The identified matrix zonotope is guaranteed to contain the true [A B]
whenever the realized disturbances lie in the assumed per-step set.
"""

import numpy as np
from scipy.optimize import linprog

from .setcalc import MatrixZonotope, Zonotope, minkowski_sum, mz_zono_mul, reduce_order
from . import sysdata

COND_LIMIT = 1e12
MEMBERSHIP_TOL = 1e-8


class ModelSet:
    """Matrix zonotope over the stacked [A B], with provenance."""

    __slots__ = ("mz", "source", "step")

    def __init__(self, mz, source, step):
        if source not in ("fine", "coarse"):
            raise ValueError("source must be 'fine' or 'coarse'")
        self.mz = mz
        self.source = source
        self.step = float(step)

    @property
    def shape(self):
        return self.mz.shape

    def __repr__(self):
        return f"ModelSet({self.source}, step={self.step}, gamma={self.mz.order})"


class ABlock:
    """First n columns of a model set: the matrix zonotope over A alone."""

    __slots__ = ("mz",)

    def __init__(self, mz):
        if mz.shape[0] != mz.shape[1]:
            raise ValueError("A-block must be square")
        self.mz = mz


def build_model_set(data, Z_w, source="fine", step=0.0):
    """Identify the matrix zonotope of data-consistent [A B].

    Computes (X_plus + (-M_w)) D_minus^+ where M_w self-concatenates the
    per-step disturbance set over the T data columns and D_minus^+ is the
    full-row-rank pseudoinverse D^T (D D^T)^{-1}.
    """
    D = data.D_minus
    if not sysdata.check_rank(D):
        raise ValueError("data matrix D_minus is rank deficient")
    gram = D @ D.T
    if np.linalg.cond(gram) > COND_LIMIT:
        raise ValueError(
            f"D_minus D_minus^T ill-conditioned (cond > {COND_LIMIT:g})")
    pinv = np.linalg.solve(gram, D).T  # D^T (D D^T)^{-1}, shape (T, n+m)
    T = data.T
    n = data.X_plus.shape[0]
    center = (data.X_plus - np.tile(Z_w.center[:, None], (1, T))) @ pinv
    # Generator (i, j) of M_w is g_i in column j, so its image under the
    # pseudoinverse is the outer product -g_i pinv[j, :]; i-major ordering
    # matches self_concatenate.
    if Z_w.order:
        gens = -np.einsum("ni,jp->ijnp", Z_w.generators, pinv)
        gens = gens.reshape(Z_w.order * T, n, pinv.shape[1])
    else:
        gens = np.zeros((0, n, pinv.shape[1]))
    return ModelSet(MatrixZonotope(center, gens), source, step)


def extract_A_block(ms):
    """Truncate the model set to its first n columns."""
    n = ms.shape[0]
    return ABlock(MatrixZonotope(ms.mz.center[:, :n],
                                 ms.mz.generators[:, :, :n]))


def estimate_coarse_noise(ab, Z_w_f, Ns, rho=4):
    """Coarse-step disturbance over-approximation from the A-block set.

    Iterates S_i = ab * S_{i-1} + Z_w_f for Ns - 1 steps with order
    reduction after each step; contains the exact coarse disturbance set.
    """
    if Ns < 1:
        raise ValueError("Ns must be >= 1")
    S = Z_w_f
    for _ in range(Ns - 1):
        S = minkowski_sum(mz_zono_mul(ab.mz, S), Z_w_f)
        S = reduce_order(S, rho)
    return S


def _mz_member(mz, M, tol):
    """Linear feasibility: does some ||alpha||_inf <= 1 reproduce M?"""
    M = np.asarray(M, dtype=float)
    if M.shape != mz.shape:
        raise ValueError("shape mismatch")
    b = (M - mz.center).ravel()
    g = mz.order
    if g == 0:
        return bool(np.max(np.abs(b), initial=0.0) <= tol)
    G = mz.generators.reshape(g, -1).T  # (n*p, gamma)
    c_obj = np.zeros(g + 1)
    c_obj[-1] = 1.0
    eye = np.eye(g)
    ones = np.ones((g, 1))
    A_ub = np.block([[eye, -ones], [-eye, -ones]])
    A_eq = np.hstack([G, np.zeros((G.shape[0], 1))])
    res = linprog(c_obj, A_ub=A_ub, b_ub=np.zeros(2 * g), A_eq=A_eq,
                  b_eq=b, bounds=[(None, None)] * g + [(0.0, None)],
                  method="highs")
    if not res.success:
        return False
    return bool(res.x[-1] <= 1.0 + tol)


def verify_membership(ms, M, tol=MEMBERSHIP_TOL):
    """True iff the fixed matrix M lies in the model set."""
    return _mz_member(ms.mz, M, tol)
