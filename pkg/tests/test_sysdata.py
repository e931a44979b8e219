import numpy as np
import pytest
import scipy.linalg

from zonoreach.setcalc import Zonotope, interval_hull, support_function, direction_set
from zonoreach import benchmark, sysdata


def test_expm_matches_scipy(rng):
    for _ in range(10):
        A = rng.normal(size=(5, 5))
        assert np.allclose(sysdata._expm(A), scipy.linalg.expm(A),
                           rtol=1e-10, atol=1e-12)


def test_expm_large_norm(rng):
    A = 50.0 * rng.normal(size=(4, 4))
    assert np.allclose(sysdata._expm(A), scipy.linalg.expm(A), rtol=1e-8)


def test_continuous_system_requires_invertible_A():
    with pytest.raises(ValueError):
        sysdata.ContinuousSystem(np.zeros((2, 2)), np.ones((2, 1)), 0.1)


def test_discretize_matrices():
    csys = benchmark.continuous_system()
    d = sysdata.discretize(csys, 0.05)
    assert np.allclose(d.A, scipy.linalg.expm(0.05 * csys.A_c))
    B_w = np.linalg.solve(csys.A_c, d.A - np.eye(5))
    assert np.allclose(d.B, B_w @ csys.B_c)


def test_discretize_noise_modes():
    csys = benchmark.continuous_system()
    direct = sysdata.discretize(csys, 0.05, noise_mode="direct")
    assert np.allclose(direct.Z_w.generators, csys.sigma_w * np.eye(5))
    integ = sysdata.discretize(csys, 0.05, noise_mode="integrated")
    B_w = np.linalg.solve(csys.A_c, direct.A - np.eye(5))
    assert np.allclose(integ.Z_w.generators, csys.sigma_w * B_w)


def test_simulate_recursion(rng):
    csys = benchmark.continuous_system()
    d = sysdata.discretize(csys, 0.05)
    x0 = rng.normal(size=5)
    inputs = rng.normal(size=(4, 1))
    noises = rng.normal(size=(4, 5))
    states = sysdata.simulate(d, x0, inputs, noises)
    assert states.shape == (5, 5)
    for k in range(4):
        expect = d.A @ states[k] + d.B @ inputs[k] + noises[k]
        assert np.allclose(states[k + 1], expect)


def test_collect_data_consistency():
    csys = benchmark.continuous_system()
    d = sysdata.discretize(csys, 0.05)
    data = sysdata.collect_data(d, 30, np.ones(5), benchmark.U_SET,
                                rng_seed=3)
    assert data.T == 30
    assert data.D_minus.shape == (6, 30)
    resid = data.X_plus - d.A @ data.X_minus - d.B @ data.U_minus
    hull = interval_hull(d.Z_w)
    assert np.all(resid >= hull.lower[:, None] - 1e-12)
    assert np.all(resid <= hull.upper[:, None] + 1e-12)


def test_collect_data_hold_blocks():
    csys = benchmark.continuous_system()
    d = sysdata.discretize(csys, 0.05)
    data = sysdata.collect_data(d, 12, np.ones(5), benchmark.U_SET,
                                rng_seed=3, hold=3)
    u = data.U_minus.ravel()
    for b in range(4):
        assert np.all(u[3 * b:3 * b + 3] == u[3 * b])


def test_subsample_coarse_indexing():
    csys = benchmark.continuous_system()
    d = sysdata.discretize(csys, 0.05)
    data = sysdata.collect_data(d, 12, np.ones(5), benchmark.U_SET,
                                rng_seed=3, hold=3)
    coarse = sysdata.subsample_coarse(data, 3)
    assert coarse.T == 4
    assert np.array_equal(coarse.X_minus[:, 0], data.X_minus[:, 0])
    assert np.array_equal(coarse.X_plus[:, 0], data.X_plus[:, 2])
    assert np.array_equal(coarse.X_minus[:, 1], data.X_minus[:, 3])


def test_check_rank():
    assert sysdata.check_rank(np.eye(4))
    deficient = np.vstack([np.eye(3), np.eye(3)[0:1]])
    assert not sysdata.check_rank(deficient)


def test_exact_coarse_noise_unroll(rng):
    A = 0.5 * rng.normal(size=(3, 3))
    Zw = Zonotope(np.zeros(3), 0.01 * rng.normal(size=(3, 3)))
    out = sysdata.exact_coarse_noise(A, Zw, 3)
    # oracle: support of sum_{i=0..2} A^i Zw is the sum of supports
    for d in direction_set(3, 32):
        expect = sum(support_function(Zw, np.linalg.matrix_power(A, i).T @ d)
                     for i in range(3))
        assert support_function(out, d) == pytest.approx(expect, abs=1e-12)
