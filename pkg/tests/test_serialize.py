import os

import numpy as np

from zonoreach import reach, serialize
from zonoreach.conformal import CalibrationRecord
from zonoreach.setcalc import MatrixZonotope, Zonotope


def test_zonotope_round_trip(rng, tmp_path):
    Z = Zonotope(rng.normal(size=4), rng.normal(size=(4, 7)))
    path = tmp_path / "z.json"
    serialize.dump(serialize.zonotope_to_doc(Z), str(path))
    back = serialize.zonotope_from_doc(serialize.load(str(path)))
    assert np.array_equal(back.center, Z.center)
    assert np.array_equal(back.generators, Z.generators)


def test_matrix_zonotope_round_trip(rng):
    M = MatrixZonotope(rng.normal(size=(3, 4)), rng.normal(size=(5, 3, 4)))
    back = serialize.matrix_zonotope_from_doc(serialize.matrix_zonotope_to_doc(M))
    assert np.array_equal(back.center, M.center)
    assert np.array_equal(back.generators, M.generators)


def test_chain_doc_and_csv(bench, tmp_path):
    chain = reach.run_model_based(bench.fine.A, bench.fine.B, bench.X0,
                                  bench.U, bench.fine.Z_w, bench.fine.delta,
                                  3)
    doc = serialize.chain_to_doc(chain)
    assert len(doc["steps"]) == 4
    assert doc["kind"] == chain.kind
    csv = serialize.chain_to_csv(chain)
    lines = csv.strip().splitlines()
    assert lines[0] == "t,dim,lower,upper"
    assert len(lines) == 1 + 4 * 5
    t, dim, lo, hi = lines[1].split(",")
    assert float(lo) <= float(hi)


def test_calibration_round_trip(tmp_path):
    record = CalibrationRecord([0.1, -0.2, 0.05], 0.05, 0.1, "pointwise",
                               n_traj=10)
    path = str(tmp_path / "cal.json")
    serialize.dump(serialize.calibration_to_doc(record), path)
    back = serialize.calibration_from_doc(serialize.load(path))
    assert back.scores == record.scores
    assert back.q_hat == record.q_hat
    assert back.mode == record.mode
    assert back.n_traj == record.n_traj


def test_float_repr_bit_stable(tmp_path):
    vals = [0.1 + 0.2, 1e-17, -3.141592653589793]
    Z = Zonotope(np.array(vals), np.zeros((3, 0)))
    path = str(tmp_path / "f.json")
    serialize.dump(serialize.zonotope_to_doc(Z), path)
    back = serialize.zonotope_from_doc(serialize.load(path))
    assert back.center.tobytes() == Z.center.tobytes()
