"""Structured text (JSON) round-tripping for all value types.

Floats are emitted with shortest round-trip repr, so dump/load is
bit-stable for finite doubles.
"""

import json

import numpy as np

from .setcalc import MatrixZonotope, Zonotope
from .sysdata import DataMatrices
from .ddmodel import ModelSet
from .conformal import CalibrationRecord


def _vec(a):
    return [float(v) for v in np.asarray(a).ravel()]


def zonotope_to_doc(Z):
    return {
        "dim": Z.dim,
        "center": _vec(Z.center),
        # column-major: one array per generator
        "generators": [_vec(Z.generators[:, j]) for j in range(Z.order)],
    }


def zonotope_from_doc(doc):
    n = int(doc["dim"])
    gens = np.array(doc["generators"], dtype=float).reshape(-1, n).T
    return Zonotope(np.array(doc["center"], dtype=float), gens)


def matrix_zonotope_to_doc(M):
    n, p = M.shape
    return {
        "rows": n,
        "cols": p,
        "center": [_vec(row) for row in M.center],
        "generators": [[_vec(row) for row in G] for G in M.generators],
    }


def matrix_zonotope_from_doc(doc):
    center = np.array(doc["center"], dtype=float)
    gens = np.array(doc["generators"], dtype=float) if doc["generators"] \
        else np.zeros((0,) + center.shape)
    return MatrixZonotope(center, gens)


def data_to_doc(data, seed=None):
    doc = {
        "T": data.T,
        "X_plus": [_vec(r) for r in data.X_plus],
        "X_minus": [_vec(r) for r in data.X_minus],
        "U_minus": [_vec(r) for r in data.U_minus],
    }
    if seed is not None:
        doc["seed"] = seed
    return doc


def data_from_doc(doc):
    return DataMatrices(np.array(doc["X_plus"], dtype=float),
                        np.array(doc["X_minus"], dtype=float),
                        np.array(doc["U_minus"], dtype=float))


def model_set_to_doc(ms, provenance=None):
    doc = {
        "mz": matrix_zonotope_to_doc(ms.mz),
        "source": ms.source,
        "step": ms.step,
    }
    if provenance:
        doc["provenance"] = provenance
    return doc


def model_set_from_doc(doc):
    return ModelSet(matrix_zonotope_from_doc(doc["mz"]), doc["source"],
                    doc["step"])


def chain_to_doc(chain):
    from .setcalc import interval_hull
    records = []
    for t, Z in zip(chain.times, chain.sets):
        hull = interval_hull(Z)
        records.append({
            "t": t,
            "kind": chain.kind,
            "center": _vec(Z.center),
            "generators": [_vec(Z.generators[:, j]) for j in range(Z.order)],
            "hull_lower": _vec(hull.lower),
            "hull_upper": _vec(hull.upper),
        })
    return {"kind": chain.kind, "mult_count": chain.mult_count,
            "steps": records}


def chain_to_csv(chain):
    """Flat CSV (t, dim, lower, upper) of the interval hulls."""
    from .setcalc import interval_hull
    lines = ["t,dim,lower,upper"]
    for t, Z in zip(chain.times, chain.sets):
        hull = interval_hull(Z)
        for d in range(Z.dim):
            lines.append(f"{float(t)!r},{d},"
                         f"{float(hull.lower[d])!r},{float(hull.upper[d])!r}")
    return "\n".join(lines) + "\n"


def calibration_to_doc(record):
    return {
        "scores": [float(s) for s in record.scores],
        "delta": record.delta,
        "q_hat": record.q_hat,
        "mode": record.mode,
        "n_cal": record.n_cal,
        "n_traj": record.n_traj,
    }


def calibration_from_doc(doc):
    return CalibrationRecord(doc["scores"], doc["delta"], doc["q_hat"],
                             doc["mode"], doc.get("n_traj"))


def dump(doc, path):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load(path):
    with open(path) as fh:
        return json.load(fh)
