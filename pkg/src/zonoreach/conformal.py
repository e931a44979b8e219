"""Split conformal calibration for set-valued predictors.

Scores measure worst-case interval-hull violation; the finite-sample
quantile inflates predictions uniformly per axis, giving pointwise or
path-wise coverage under exchangeability.
"""

import math

import numpy as np
from scipy.stats import binomtest

from .setcalc import Zonotope, interval_hull, minkowski_sum, reduce_order


class CalibrationRecord:
    """Frozen outcome of one calibration run."""

    __slots__ = ("scores", "delta", "q_hat", "mode", "n_traj")

    def __init__(self, scores, delta, q_hat, mode, n_traj=None):
        if mode not in ("pointwise", "pathwise"):
            raise ValueError("mode must be 'pointwise' or 'pathwise'")
        self.scores = list(scores)
        self.delta = float(delta)
        self.q_hat = float(q_hat)
        self.mode = mode
        self.n_traj = n_traj

    @property
    def n_cal(self):
        return len(self.scores)


class CalibrationInstance:
    """One calibration task: start/end anchors plus per-substep state samples.

    ``states`` is a list over substeps j = 1 .. Ns-1, each an (M, n) array
    of simulated trajectory states at that fine time.
    """

    __slots__ = ("start", "end", "Ns", "states")

    def __init__(self, start, end, Ns, states):
        if len(states) != Ns - 1:
            raise ValueError("need Ns - 1 per-substep state arrays")
        self.start = start
        self.end = end
        self.Ns = Ns
        self.states = [np.atleast_2d(np.asarray(s, dtype=float)) for s in states]


def pointwise_score(predicted, states):
    """Worst hull violation of any sample in any dimension.

    Negative when every sample is strictly inside the hull.
    """
    states = np.atleast_2d(np.asarray(states, dtype=float))
    if states.size == 0:
        raise ValueError("no states given")
    if states.shape[1] != predicted.dim:
        raise ValueError("state dimension mismatch")
    hull = interval_hull(predicted)
    viol = np.maximum(hull.lower - states, states - hull.upper)
    return float(np.max(viol))


def pathwise_score(predicted_sets, states_per_substep):
    """Maximum pointwise violation across all substeps of one interval."""
    if len(predicted_sets) != len(states_per_substep):
        raise ValueError("substep lists misaligned")
    return max(pointwise_score(Z, s)
               for Z, s in zip(predicted_sets, states_per_substep))


def conformal_quantile(scores, delta):
    """Finite-sample quantile at level ceil((N+1)(1-delta))/N, clamped at 0."""
    scores = list(scores)
    n = len(scores)
    if n == 0:
        raise ValueError("no scores")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    level = math.ceil((n + 1) * (1.0 - delta)) / n
    ordered = sorted(scores)
    if level > 1.0:
        q = ordered[-1]
    else:
        q = ordered[math.ceil(level * n) - 1]
    return max(0.0, float(q))


def inflate(Z, q):
    """Minkowski sum with the axis-aligned box of radius q."""
    if q < 0:
        raise ValueError("inflation radius must be nonnegative")
    return minkowski_sum(Z, Zonotope(np.zeros(Z.dim), q * np.eye(Z.dim)))


def _predict_interval(predictor, instance):
    """Autoregressive predictions for one instance, j = 1 .. Ns - 1."""
    out = []
    R = instance.start
    for j in range(1, instance.Ns):
        R = predictor.predict(R, instance.end, j, instance.Ns)
        out.append(R)
    return out


def calibrate(predictor, instances, delta, mode="pointwise", n_traj=None):
    """Score the predictor on held-out instances and fix the quantile.

    Pointwise mode scores every (instance, substep) pair separately;
    pathwise mode takes the per-instance maximum over substeps.
    """
    instances = list(instances)
    if len(instances) < math.ceil(1.0 / delta) - 1:
        import warnings
        warnings.warn(
            "too few calibration instances: quantile degenerates to the "
            "maximum score", stacklevel=2)
    scores = []
    for inst in instances:
        preds = _predict_interval(predictor, inst)
        if mode == "pathwise":
            scores.append(pathwise_score(preds, inst.states))
        else:
            scores.extend(pointwise_score(Z, s)
                          for Z, s in zip(preds, inst.states))
    q = conformal_quantile(scores, delta)
    return CalibrationRecord(scores, delta, q, mode, n_traj=n_traj)


def evaluate_coverage(predictor, record, instances):
    """Empirical coverage of the inflated predictions on fresh instances.

    Returns per-substep pointwise coverage and per-interval path coverage,
    each with a binomial 95% confidence interval.
    """
    instances = list(instances)
    Ns = instances[0].Ns
    hits = np.zeros(Ns - 1, dtype=int)
    totals = np.zeros(Ns - 1, dtype=int)
    path_hits = 0
    for inst in instances:
        preds = _predict_interval(predictor, inst)
        path_ok = True
        for j, (Z, states) in enumerate(zip(preds, inst.states)):
            hull = interval_hull(inflate(Z, record.q_hat))
            inside = np.all((states >= hull.lower) & (states <= hull.upper),
                            axis=1)
            hits[j] += int(np.sum(inside))
            totals[j] += states.shape[0]
            if not np.all(inside):
                path_ok = False
        path_hits += int(path_ok)
    rows = []
    for j in range(Ns - 1):
        ci = binomtest(int(hits[j]), int(totals[j])).proportion_ci(0.95)
        rows.append({"substep": j + 1, "coverage": hits[j] / totals[j],
                     "ci_low": ci.low, "ci_high": ci.high})
    path_ci = binomtest(path_hits, len(instances)).proportion_ci(0.95)
    return {
        "pointwise": rows,
        "pointwise_overall": float(hits.sum() / totals.sum()),
        "path_coverage": path_hits / len(instances),
        "path_ci": (path_ci.low, path_ci.high),
        "n_instances": len(instances),
    }


class BaselinePredictor:
    """Deterministic convex blend between the current set and the endpoint.

    Stands in for a learned predictor so calibration and coverage are
    testable on their own.
    """

    def __init__(self, rho=4, shrink=1.0):
        self.rho = rho
        self.shrink = shrink

    def predict(self, current, endpoint, j, Ns):
        if current.dim != endpoint.dim:
            raise ValueError("dimension mismatch")
        w = j / Ns
        center = (1.0 - w) * current.center + w * endpoint.center
        gens = np.hstack([(1.0 - w) * current.generators,
                          w * endpoint.generators]) * self.shrink
        return reduce_order(Zonotope(center, gens), self.rho)
