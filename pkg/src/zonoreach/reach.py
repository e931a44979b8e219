"""Reachable-set propagation chains.

Four chains share one step operator: sequential coarse anchors, parallel
per-interval interpolation started from the anchors, the plain fine chain,
and the fixed-matrix model-based reference chain.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .setcalc import (
    MatrixZonotope,
    Zonotope,
    cartesian_product,
    interval_hull,
    linear_map,
    minkowski_sum,
    mz_zono_mul,
    reduce_order,
    hausdorff_estimate,
)
from .ddmodel import ModelSet, ABlock
from .sysdata import exact_coarse_noise


class ChainConfig:
    """Horizon and resolution parameters shared by all chains."""

    __slots__ = ("K", "Ns", "rho", "input_set", "coarse_noise_mode", "workers")

    def __init__(self, K, Ns, rho, input_set, coarse_noise_mode="estimated",
                 workers=1):
        if K < 1 or Ns < 2 or rho < 1:
            raise ValueError("need K >= 1, Ns >= 2, rho >= 1")
        if coarse_noise_mode not in ("estimated", "exact-oracle"):
            raise ValueError("unknown coarse noise mode")
        self.K = K
        self.Ns = Ns
        self.rho = rho
        self.input_set = input_set
        self.coarse_noise_mode = coarse_noise_mode
        self.workers = workers


class ReachChain:
    """Time-indexed zonotope sequence with provenance and cost accounting."""

    KINDS = ("anchor", "interpolated", "fine", "model_based")

    __slots__ = ("sets", "kind", "times", "mult_count")

    def __init__(self, sets, kind, times, mult_count):
        if kind not in self.KINDS:
            raise ValueError(f"unknown chain kind {kind!r}")
        times = list(times)
        if len(sets) != len(times) or not sets:
            raise ValueError("sets/times mismatch")
        if any(t1 >= t2 for t1, t2 in zip(times, times[1:])):
            raise ValueError("times must be strictly increasing")
        self.sets = list(sets)
        self.kind = kind
        self.times = times
        self.mult_count = mult_count

    def __len__(self):
        return len(self.sets)


def _as_mz(model):
    if isinstance(model, (ModelSet, ABlock)):
        return model.mz
    return model


def propagate_step(model, R, U, Zw, rho=None):
    """One step: model * (R x U) + Zw, order-reduced.

    ``model`` may be a ModelSet, a MatrixZonotope, or a fixed [A B] array,
    in which case the step is the exact A R + B U + Zw.
    """
    n = R.dim
    if isinstance(model, np.ndarray):
        A, B = model[:, :n], model[:, n:]
        out = minkowski_sum(minkowski_sum(linear_map(A, R), linear_map(B, U)), Zw)
    else:
        out = minkowski_sum(mz_zono_mul(_as_mz(model), cartesian_product(R, U)), Zw)
    if rho is not None:
        out = reduce_order(out, rho)
    return out


def compute_anchors(cfg, coarse_model, X0, Zw_c):
    """Phase 1: K sequential coarse steps from X0."""
    delta_c = coarse_model.step if isinstance(coarse_model, ModelSet) else 1.0
    sets = [X0]
    R = X0
    for _ in range(cfg.K):
        R = propagate_step(coarse_model, R, cfg.input_set, Zw_c, cfg.rho)
        sets.append(R)
    times = [k * delta_c for k in range(cfg.K + 1)]
    return ReachChain(sets, "anchor", times, mult_count=cfg.K)


def interpolate_interval(k, anchor_k, fine_model, cfg, Zw_f):
    """Phase 2 work for one coarse interval: Ns - 1 fine steps from the anchor."""
    out = []
    R = anchor_k
    for _ in range(1, cfg.Ns):
        R = propagate_step(fine_model, R, cfg.input_set, Zw_f, cfg.rho)
        out.append(R)
    return out


def _interval_work(anchor_start, anchor_end, fine_model, cfg, Zw_f,
                   predictor, q_hat):
    n = anchor_start.dim
    out = []
    R = anchor_start
    for j in range(1, cfg.Ns):
        if predictor is None:
            R = propagate_step(fine_model, R, cfg.input_set, Zw_f, cfg.rho)
        else:
            R = predictor.predict(R, anchor_end, j, cfg.Ns)
            R = minkowski_sum(R, Zonotope(np.zeros(n), q_hat * np.eye(n)))
        out.append(R)
    return out


class IraResult:
    """Anchors plus the per-interval interpolated sets, with a flat view."""

    __slots__ = ("anchors", "intervals", "delta_f", "mult_count")

    def __init__(self, anchors, intervals, delta_f, mult_count):
        self.anchors = anchors
        self.intervals = intervals
        self.delta_f = delta_f
        self.mult_count = mult_count

    def all_sets(self):
        """Sets at every fine time point t = j * delta_f, j = 0 .. K*Ns."""
        Ns = len(self.intervals[0]) + 1
        sets = [self.anchors.sets[0]]
        times = [0.0]
        for k, interval in enumerate(self.intervals):
            for j, Z in enumerate(interval, start=1):
                sets.append(Z)
                times.append((k * Ns + j) * self.delta_f)
            sets.append(self.anchors.sets[k + 1])
            times.append((k + 1) * Ns * self.delta_f)
        return sets, times


def run_ira(cfg, coarse_model, fine_model, X0, Zw_c, Zw_f, predictor=None,
            q_hat=None):
    """Full two-phase run: sequential anchors, then parallel interpolation.

    Interval workers share only read-only inputs, so the result is
    identical for any worker count. Predictor mode requires a calibrated
    quantile; without a predictor the exact fine-step interpolation runs.
    """
    if predictor is not None and q_hat is None:
        raise ValueError("predictor requires a calibrated quantile")
    anchors = compute_anchors(cfg, coarse_model, X0, Zw_c)
    work = [(anchors.sets[k], anchors.sets[k + 1]) for k in range(cfg.K)]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [
                pool.submit(_interval_work, a, b, fine_model, cfg, Zw_f,
                            predictor, q_hat)
                for a, b in work
            ]
            intervals = [f.result() for f in futures]
    else:
        intervals = [
            _interval_work(a, b, fine_model, cfg, Zw_f, predictor, q_hat)
            for a, b in work
        ]
    delta_f = (fine_model.step if isinstance(fine_model, ModelSet)
               else anchors.times[1] / cfg.Ns if cfg.K else 1.0)
    mults = cfg.K + (0 if predictor is not None else cfg.K * (cfg.Ns - 1))
    return IraResult(anchors, intervals, delta_f, mults)


def run_fine_chain(cfg, fine_model, X0, Zw_f):
    """Sequential fine-resolution chain over K * Ns steps."""
    delta_f = fine_model.step if isinstance(fine_model, ModelSet) else 1.0
    steps = cfg.K * cfg.Ns
    sets = [X0]
    R = X0
    for _ in range(steps):
        R = propagate_step(fine_model, R, cfg.input_set, Zw_f, cfg.rho)
        sets.append(R)
    times = [j * delta_f for j in range(steps + 1)]
    return ReachChain(sets, "fine", times, mult_count=steps)


def run_model_based(A, B, X0, U, Zw, delta, steps, rho=None):
    """Fixed-matrix reference chain A R + B U + Zw (exact, unreduced by default)."""
    AB = np.hstack([np.atleast_2d(A), np.atleast_2d(B)])
    sets = [X0]
    R = X0
    for _ in range(steps):
        R = propagate_step(AB, R, U, Zw, rho)
        sets.append(R)
    times = [j * delta for j in range(steps + 1)]
    return ReachChain(sets, "model_based", times, mult_count=0)


def coarse_effective_disturbance(A_f, B_f, U, Zw_f, Ns):
    """Exact one-coarse-step image of per-fine-step inputs and disturbances.

    Unrolling Ns fine steps maps the per-step set B_f U + Zw_f through the
    powers of A_f; using this as the coarse disturbance makes the coarse
    model-based chain equal the fine one at shared times.
    """
    per_step = minkowski_sum(linear_map(B_f, U), Zw_f)
    return exact_coarse_noise(A_f, per_step, Ns)


def check_tightness_premise(anchor_k, fine_set, tol=0.0):
    """Interval-hull containment of the anchor in the fine-chain set."""
    if anchor_k.dim != fine_set.dim:
        raise ValueError("dimension mismatch")
    return interval_hull(anchor_k).subset_of(interval_hull(fine_set), tol)


class SensitivityReport:
    """Per-dimension width comparison of one coarse step vs Ns fine steps."""

    __slots__ = ("widths_coarse", "widths_fine", "hausdorff", "rel_gap",
                 "flagged")

    def __init__(self, widths_coarse, widths_fine, hausdorff, rel_gap, flagged):
        self.widths_coarse = widths_coarse
        self.widths_fine = widths_fine
        self.hausdorff = hausdorff
        self.rel_gap = rel_gap
        self.flagged = flagged


def step_size_sensitivity_report(coarse_model, fine_model, X0, U, Zw_c, Zw_f,
                                 Ns, rho=4):
    """Compare the set after one coarse step against Ns fine steps.

    Both correspond to the same physical time; the report flags width
    inequality above 1e-6 relative.
    """
    R_c = propagate_step(coarse_model, X0, U, Zw_c, rho)
    R_f = X0
    for _ in range(Ns):
        R_f = propagate_step(fine_model, R_f, U, Zw_f, rho)
    w_c = interval_hull(R_c).width
    w_f = interval_hull(R_f).width
    scale = np.maximum(np.maximum(np.abs(w_c), np.abs(w_f)), 1e-300)
    rel_gap = float(np.max(np.abs(w_c - w_f) / scale))
    return SensitivityReport(
        widths_coarse=w_c,
        widths_fine=w_f,
        hausdorff=hausdorff_estimate(R_c, R_f, max(64, 2 * X0.dim)),
        rel_gap=rel_gap,
        flagged=rel_gap > 1e-6,
    )


def depth_model(K, Ns):
    """Work/depth accounting under equal per-step cost."""
    if K < 1 or Ns < 1:
        raise ValueError("need K, Ns >= 1")
    return {
        "total_fine": K * Ns,
        "work_ira": K + K * (Ns - 1),
        "depth_ira": K + (Ns - 1),
        "speedup": K * Ns / (K + Ns - 1),
    }
