import math

import numpy as np
import pytest

from rgl import (Configuration, KernelSpec, LOG, Scale, cds_constant,
                 close_pair_energy, kernel_value, scale_configuration,
                 truncated_kernel, truncation_excess)


def test_kernel_value_log():
    k = KernelSpec(d=1, s=LOG)
    assert kernel_value(k, 1.0) == 0.0
    assert kernel_value(k, 2.0) == pytest.approx(-math.log(2.0))


def test_kernel_value_riesz():
    k = KernelSpec(d=2, s=1.0)
    assert kernel_value(k, 0.5) == pytest.approx(2.0)


def test_kernel_value_rejects_nonpositive():
    k = KernelSpec(d=1, s=LOG)
    with pytest.raises(ValueError):
        kernel_value(k, 0.0)
    with pytest.raises(ValueError):
        kernel_value(k, -1.0)


def test_homogeneity_numeric_s():
    k = KernelSpec(d=2, s=0.7)
    rng = np.random.default_rng(0)
    for _ in range(50):
        r = rng.uniform(0.01, 10.0)
        lam = rng.uniform(0.1, 10.0)
        assert kernel_value(k, lam * r) == pytest.approx(
            lam ** -0.7 * kernel_value(k, r), rel=1e-12)


def test_log_scaling_rule():
    k = KernelSpec(d=1, s=LOG)
    rng = np.random.default_rng(1)
    for _ in range(50):
        r = rng.uniform(0.01, 10.0)
        lam = rng.uniform(0.1, 10.0)
        assert kernel_value(k, lam * r) == pytest.approx(
            kernel_value(k, r) - math.log(lam), abs=1e-12)


def test_truncated_kernel_log_examples():
    k = KernelSpec(d=1, s=LOG)
    # r > eta: no clipping
    assert truncated_kernel(k, 0.1, 0.2) == pytest.approx(-math.log(0.2))
    assert truncation_excess(k, 0.1, 0.2) == 0.0
    # r < eta: excess is difference of logs
    assert truncation_excess(k, 0.1, 0.05) == pytest.approx(math.log(2.0))


def test_truncated_kernel_riesz_example():
    k = KernelSpec(d=2, s=1.0)
    assert truncated_kernel(k, 0.5, 0.25) == pytest.approx(2.0)
    assert truncation_excess(k, 0.5, 0.25) == pytest.approx(2.0)


def test_truncation_sandwich_and_decomposition():
    k = KernelSpec(d=2, s=LOG)
    r = np.linspace(0.01, 2.0, 200)
    for eta_small, eta_big in [(0.05, 0.2), (0.1, 0.4)]:
        g_small = truncated_kernel(k, eta_small, r)
        g_big = truncated_kernel(k, eta_big, r)
        assert np.all(g_big <= g_small + 1e-15)
    eta = 0.3
    g_eta = truncated_kernel(k, eta, r)
    f_eta = truncation_excess(k, eta, r)
    assert np.allclose(g_eta + f_eta, kernel_value(k, r), rtol=0, atol=1e-14)
    assert np.all(f_eta[r >= eta] == 0.0)


def test_truncation_eta_validation():
    k = KernelSpec(d=1, s=LOG)
    for eta in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(ValueError):
            truncated_kernel(k, eta, 0.5)


def test_cds_constants():
    assert cds_constant(1, LOG) == pytest.approx(2 * math.pi)
    assert cds_constant(2, LOG) == pytest.approx(2 * math.pi)
    # Coulomb d=3: (d-2) 2 pi^{3/2} / Gamma(3/2) = 4 pi
    assert cds_constant(3, 1.0) == pytest.approx(4 * math.pi)


def test_cds_rejects_bad_pairs():
    with pytest.raises(ValueError):
        cds_constant(3, LOG)
    with pytest.raises(ValueError):
        cds_constant(1, 1.5)   # s >= d
    with pytest.raises(ValueError):
        cds_constant(3, 0.5)   # s < d - 2
    with pytest.raises(ValueError):
        cds_constant(2, 0.0)   # numeric zero means log


def test_kernelspec_invariants():
    with pytest.raises(ValueError):
        KernelSpec(d=3, s=LOG)
    k = KernelSpec(d=1, s=LOG)
    assert k.cds == pytest.approx(2 * math.pi)
    assert k.s_eff == 0.0
    with pytest.raises(ValueError):
        KernelSpec(d=1, s=LOG, cds=1.0)


def test_scale_configuration():
    C = Configuration(points=np.array([[1.0], [2.0]]))
    same = scale_configuration(C, 1.0)
    assert np.allclose(same.points, C.points)
    up = scale_configuration(C, 4.0)
    assert np.allclose(up.points.ravel(), [4.0, 8.0])
    C2 = Configuration(points=np.array([[1.0, 0.0]]), scale=Scale.MICRO)
    up2 = scale_configuration(C2, 4.0)
    assert np.allclose(up2.points, [[2.0, 0.0]])
    assert up2.scale is Scale.MICRO
    with pytest.raises(ValueError):
        scale_configuration(C, 0.0)


def test_scale_round_trip():
    rng = np.random.default_rng(2)
    C = Configuration(points=rng.normal(size=(20, 2)))
    back = scale_configuration(scale_configuration(C, 3.7), 1 / 3.7)
    assert np.allclose(back.points, C.points, rtol=1e-14)


def test_close_pair_energy_examples():
    k = KernelSpec(d=1, s=LOG)
    C = Configuration(points=np.array([[0.0], [10.0]]))
    assert close_pair_energy(C, k, 0.2) == 0.0
    C2 = Configuration(points=np.array([[0.0], [0.1]]))
    assert close_pair_energy(C2, k, 0.1) == pytest.approx(2 * -math.log(0.1))
    ks = KernelSpec(d=2, s=1.0)
    C3 = Configuration(points=np.array([[0.0, 0.0], [0.2, 0.0], [10.0, 0.0]]))
    assert close_pair_energy(C3, ks, 0.2) == pytest.approx(10.0)


def test_close_pair_energy_flags_coincidence():
    k = KernelSpec(d=1, s=LOG)
    C = Configuration(points=np.array([[1.0], [1.0]]))
    assert close_pair_energy(C, k, 0.3) == math.inf


def test_close_pair_energy_cluster_additivity():
    k = KernelSpec(d=1, s=LOG)
    rng = np.random.default_rng(3)
    a = rng.uniform(0, 0.3, size=(5, 1))
    b = rng.uniform(100, 100.3, size=(5, 1))
    eta = 0.25
    ca = close_pair_energy(Configuration(points=a), k, eta)
    cb = close_pair_energy(Configuration(points=b), k, eta)
    cab = close_pair_energy(Configuration(points=np.vstack([a, b])), k, eta)
    assert cab == pytest.approx(ca + cb, rel=1e-12)
    # permutation invariance
    perm = rng.permutation(10)
    cper = close_pair_energy(Configuration(points=np.vstack([a, b])[perm]), k, eta)
    assert cper == pytest.approx(cab, rel=1e-12)


def test_close_pair_energy_eta_range():
    k = KernelSpec(d=1, s=LOG)
    C = Configuration(points=np.array([[0.0], [1.0]]))
    with pytest.raises(ValueError):
        close_pair_energy(C, k, 0.5)
