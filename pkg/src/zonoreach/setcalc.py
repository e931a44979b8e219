"""Zonotope and matrix-zonotope algebra.

All operations are pure functions over immutable values. Over-approximating
operations (``mz_zono_mul``, ``reduce_order``) guarantee containment of the
exact image set.
"""

import threading

import numpy as np
from scipy.optimize import linprog

CONTAINMENT_TOL = 1e-9


class _MulCounter:
    """Thread-safe counter for matrix-zonotope multiplications."""

    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    def increment(self):
        with self._lock:
            self._count += 1

    def reset(self):
        with self._lock:
            self._count = 0

    @property
    def count(self):
        with self._lock:
            return self._count


mult_counter = _MulCounter()


class Zonotope:
    """Set of points c + G @ alpha with ||alpha||_inf <= 1.

    center has shape (n,), generators shape (n, gamma); gamma may be zero,
    in which case the zonotope is the single point ``center``.
    """

    __slots__ = ("center", "generators")

    def __init__(self, center, generators=None):
        center = np.atleast_1d(np.asarray(center, dtype=float))
        if center.ndim != 1:
            raise ValueError("center must be a vector")
        n = center.shape[0]
        if generators is None:
            generators = np.zeros((n, 0))
        generators = np.asarray(generators, dtype=float)
        if generators.ndim == 1:
            generators = generators.reshape(n, -1)
        if generators.shape[0] != n:
            raise ValueError(
                f"generator rows {generators.shape[0]} != dim {n}")
        if not (np.all(np.isfinite(center)) and np.all(np.isfinite(generators))):
            raise ValueError("non-finite entries")
        self.center = center
        self.generators = generators
        self.center.flags.writeable = False
        self.generators.flags.writeable = False

    @property
    def dim(self):
        return self.center.shape[0]

    @property
    def order(self):
        return self.generators.shape[1]

    def __add__(self, other):
        return minkowski_sum(self, other)

    def __neg__(self):
        return Zonotope(-self.center, -self.generators)

    def __repr__(self):
        return f"Zonotope(dim={self.dim}, gamma={self.order})"

    def sample(self, count, rng):
        """Uniform-coefficient samples, shape (count, n). Not uniform on the body."""
        alpha = rng.uniform(-1.0, 1.0, size=(count, self.order))
        return self.center + alpha @ self.generators.T


class MatrixZonotope:
    """Set of matrices C + sum_i alpha_i G_i, ||alpha||_inf <= 1.

    generators is a (gamma, n, p) array; the leading axis orders the
    generator matrices.
    """

    __slots__ = ("center", "generators")

    def __init__(self, center, generators=None):
        center = np.asarray(center, dtype=float)
        if center.ndim != 2:
            raise ValueError("center must be a matrix")
        if generators is None:
            generators = np.zeros((0,) + center.shape)
        generators = np.asarray(generators, dtype=float)
        if generators.ndim == 2:
            generators = generators[None, :, :]
        if generators.shape[1:] != center.shape:
            raise ValueError("generator shape mismatch with center")
        if not (np.all(np.isfinite(center)) and np.all(np.isfinite(generators))):
            raise ValueError("non-finite entries")
        self.center = center
        self.generators = generators
        self.center.flags.writeable = False
        self.generators.flags.writeable = False

    @property
    def shape(self):
        return self.center.shape

    @property
    def order(self):
        return self.generators.shape[0]

    def __repr__(self):
        return f"MatrixZonotope(shape={self.shape}, gamma={self.order})"

    def sample(self, count, rng):
        """Coefficient-uniform samples, shape (count, n, p)."""
        alpha = rng.uniform(-1.0, 1.0, size=(count, self.order))
        return self.center + np.einsum("ci,inp->cnp", alpha, self.generators)


class IntervalBox:
    """Axis-aligned box [lower, upper], componentwise."""

    __slots__ = ("lower", "upper")

    def __init__(self, lower, upper):
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if lower.shape != upper.shape or np.any(lower > upper):
            raise ValueError("need lower <= upper componentwise")
        self.lower = lower
        self.upper = upper

    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, x, tol=0.0):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def subset_of(self, other, tol=0.0):
        return bool(np.all(self.lower >= other.lower - tol)
                    and np.all(self.upper <= other.upper + tol))

    def __repr__(self):
        return f"IntervalBox({self.lower}, {self.upper})"


def linear_map(L, Z):
    """Image of Z under the matrix L."""
    L = np.atleast_2d(np.asarray(L, dtype=float))
    if L.shape[1] != Z.dim:
        raise ValueError(f"matrix columns {L.shape[1]} != dim {Z.dim}")
    return Zonotope(L @ Z.center, L @ Z.generators)


def minkowski_sum(Z1, Z2):
    """Minkowski sum: centers add, generators concatenate."""
    if Z1.dim != Z2.dim:
        raise ValueError("dimension mismatch")
    return Zonotope(Z1.center + Z2.center,
                    np.hstack([Z1.generators, Z2.generators]))


def cartesian_product(Z1, Z2):
    """Stacked center, block-diagonal generators."""
    n1, n2 = Z1.dim, Z2.dim
    g1, g2 = Z1.order, Z2.order
    G = np.zeros((n1 + n2, g1 + g2))
    G[:n1, :g1] = Z1.generators
    G[n1:, g1:] = Z2.generators
    return Zonotope(np.concatenate([Z1.center, Z2.center]), G)


def self_concatenate(Z, T):
    """Matrix zonotope of all n x T matrices whose columns each lie in Z.

    Generator (i, j) places Z's generator i in column j; ordering is
    i-major (all columns of generator 0 first).
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    n, g = Z.dim, Z.order
    center = np.tile(Z.center[:, None], (1, T))
    gens = np.zeros((g * T, n, T))
    for i in range(g):
        for j in range(T):
            gens[i * T + j, :, j] = Z.generators[:, i]
    return MatrixZonotope(center, gens)


def mz_zono_mul(M, Z):
    """Outer approximation of {A x | A in M, x in Z}.

    Generator layout: [C @ G_Z | G_i @ c | cross terms G_i @ g_j, i-major].
    """
    n, p = M.shape
    if p != Z.dim:
        raise ValueError(f"matrix columns {p} != dim {Z.dim}")
    mult_counter.increment()
    c = M.center @ Z.center
    parts = [M.center @ Z.generators]
    if M.order:
        parts.append(np.einsum("inp,p->ni", M.generators, Z.center))
        if Z.order:
            cross = np.einsum("inp,pj->nij", M.generators, Z.generators)
            parts.append(cross.reshape(n, M.order * Z.order))
    return Zonotope(c, np.hstack(parts))


def interval_hull(Z):
    """Tight axis-aligned bounding box of Z."""
    radius = np.sum(np.abs(Z.generators), axis=1)
    return IntervalBox(Z.center - radius, Z.center + radius)


def reduce_order(Z, rho):
    """Girard reduction to at most rho * n generators; result contains Z.

    The generators smallest by ||g||_1 - ||g||_inf are replaced by their
    interval hull.
    """
    n, g = Z.dim, Z.order
    if rho * n < n:
        raise ValueError("rho * n < n leaves no room for the box part")
    if g <= rho * n:
        return Z
    G = Z.generators
    score = np.sum(np.abs(G), axis=0) - np.max(np.abs(G), axis=0)
    idx = np.argsort(score, kind="stable")
    n_keep = (rho - 1) * n
    keep = idx[g - n_keep:] if n_keep else idx[:0]
    box = idx[:g - n_keep]
    radius = np.sum(np.abs(G[:, box]), axis=1)
    return Zonotope(Z.center, np.hstack([G[:, keep], np.diag(radius)]))


def support_function(Z, d):
    """h_Z(d) = d.c + sum_i |d.g_i|; exact for zonotopes."""
    d = np.asarray(d, dtype=float)
    if d.shape != (Z.dim,):
        raise ValueError("direction dimension mismatch")
    return float(d @ Z.center + np.sum(np.abs(d @ Z.generators)))


def support_functions(Z, dirs):
    """Vectorized support function over rows of ``dirs``."""
    dirs = np.asarray(dirs, dtype=float)
    return dirs @ Z.center + np.sum(np.abs(dirs @ Z.generators), axis=1)


def contains_point(Z, x, tol=CONTAINMENT_TOL):
    """Exact membership test via the LP min ||alpha||_inf s.t. G alpha = x - c."""
    x = np.asarray(x, dtype=float)
    if x.shape != (Z.dim,):
        raise ValueError("point dimension mismatch")
    b = x - Z.center
    g = Z.order
    if g == 0:
        return bool(np.max(np.abs(b), initial=0.0) <= tol)
    # Quick reject: outside the interval hull means outside the zonotope.
    if np.any(np.abs(b) > np.sum(np.abs(Z.generators), axis=1) + tol):
        return False
    # Variables [alpha, t]: minimize t with |alpha_i| <= t, G alpha = b.
    c_obj = np.zeros(g + 1)
    c_obj[-1] = 1.0
    eye = np.eye(g)
    ones = np.ones((g, 1))
    A_ub = np.block([[eye, -ones], [-eye, -ones]])
    b_ub = np.zeros(2 * g)
    A_eq = np.hstack([Z.generators, np.zeros((Z.dim, 1))])
    bounds = [(None, None)] * g + [(0.0, None)]
    res = linprog(c_obj, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b,
                  bounds=bounds, method="highs")
    if not res.success:
        return False
    return bool(res.x[-1] <= 1.0 + tol)


def direction_set(n, n_dirs, seed=0):
    """Deterministic unit directions: +-axes first, then seeded random ones."""
    if n_dirs < 2 * n:
        raise ValueError("need at least 2n directions")
    dirs = np.vstack([np.eye(n), -np.eye(n)])
    extra = n_dirs - 2 * n
    if extra:
        rng = np.random.default_rng(seed)
        v = rng.standard_normal((extra, n))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        dirs = np.vstack([dirs, v])
    return dirs


def hausdorff_estimate(Z1, Z2, n_dirs=64):
    """Lower bound on the Hausdorff distance via support-function sampling."""
    if Z1.dim != Z2.dim:
        raise ValueError("dimension mismatch")
    dirs = direction_set(Z1.dim, n_dirs)
    return float(np.max(np.abs(support_functions(Z1, dirs)
                               - support_functions(Z2, dirs))))
