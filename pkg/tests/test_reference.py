import math

import numpy as np
import pytest
from scipy.stats import chi2

from rgl import Scale
from rgl.fields import ks_two_sample, wasserstein1_to_measure
from rgl.reference import (Window, lattice_config, quantile_config,
                           sample_beta_hermite, sample_ginibre, sample_poisson)


def rejection_gap_oracle(n, beta, a, rng):
    """Gap |x1 - x2| of the two-particle gas with V(x) = a x^2 by direct
    rejection sampling of v = (x1 - x2)/sqrt(2), density ~ |v|^b e^{-a b v^2}."""
    out = []
    M = (1.0 / a) ** (beta / 2) * math.exp(-beta / 2)
    got = 0
    while got < n:
        m = (n - got) * 4 + 1000
        v = rng.normal(0.0, math.sqrt(1.0 / (a * beta)), size=m)
        ratio = np.abs(v) ** beta * np.exp(-a * beta * v ** 2 / 2.0) / M
        assert ratio.max() <= 1.0 + 1e-12
        keep = rng.random(m) < ratio
        vk = np.abs(v[keep])
        out.append(vk)
        got += len(vk)
    return math.sqrt(2.0) * np.concatenate(out)[:n]


# --- Poisson ----------------------------------------------------------------

def test_poisson_zero_volume_limit():
    w = Window(center=(0.0,), sides=(1e-9,))
    c = sample_poisson(1.0, w, seed=0)
    assert c.n == 0
    assert c.scale is Scale.MICRO


def test_poisson_mean_and_fano():
    w = Window(center=(0.0,), sides=(100.0,))
    counts = np.array([sample_poisson(1.0, w, seed=s).n for s in range(3000)])
    # mean 100 +- 3 sigma of the mean estimate
    assert abs(counts.mean() - 100.0) <= 3 * 10.0 / math.sqrt(len(counts))
    fano = counts.var(ddof=1) / counts.mean()
    assert 0.95 <= fano <= 1.05


def test_poisson_points_inside_window():
    w = Window(center=(3.0, -1.0), sides=(4.0, 2.0))
    c = sample_poisson(2.0, w, seed=5)
    assert np.all(w.contains(c.points))


# --- beta-Hermite -------------------------------------------------------------

def test_beta_hermite_n2_vs_rejection_oracle():
    rng = np.random.default_rng(42)
    n = 60_000
    for a in (0.5, 1.0):
        gaps = np.array([np.ptp(sample_beta_hermite(2, 2.0, seed=s, a=a).points)
                         for s in range(n)])
        oracle = rejection_gap_oracle(n, 2.0, a, rng)
        assert ks_two_sample(gaps, oracle) <= 0.01


def test_beta_hermite_edge(mu_1d):
    tops = [sample_beta_hermite(256, 2.0, seed=s).points.max()
            for s in range(30)]
    assert 1.85 <= float(np.mean(tops)) <= 2.0


def test_beta_hermite_w1_to_semicircle(mu_1d):
    c = sample_beta_hermite(512, 2.0, seed=3)
    assert wasserstein1_to_measure(c.points, mu_1d) < 0.03


def test_beta_hermite_sorted_and_deterministic():
    a = sample_beta_hermite(32, 2.0, seed=9)
    b = sample_beta_hermite(32, 2.0, seed=9)
    assert np.array_equal(a.points, b.points)
    assert np.all(np.diff(a.points[:, 0]) > 0)
    with pytest.raises(ValueError):
        sample_beta_hermite(1, 2.0)


# --- Ginibre ------------------------------------------------------------------

def test_ginibre_angular_uniformity():
    pts = np.concatenate([sample_ginibre(256, seed=s).points
                          for s in range(40)])
    theta = np.arctan2(pts[:, 1], pts[:, 0])
    nbins = 16
    hist, _ = np.histogram(theta, bins=nbins, range=(-math.pi, math.pi))
    expected = len(pts) / nbins
    stat = float(np.sum((hist - expected) ** 2 / expected))
    p = chi2.sf(stat, nbins - 1)
    assert p > 0.01


def test_ginibre_edge_and_bulk_flatness():
    pts = np.concatenate([sample_ginibre(256, seed=s).points
                          for s in range(40)])
    r = np.sqrt((pts ** 2).sum(axis=1))
    assert np.mean(r > 1.1) < 0.02
    hist, edges = np.histogram(r, bins=8, range=(0.0, 0.8))
    area = math.pi * (edges[1:] ** 2 - edges[:-1] ** 2)
    dens = hist / area
    assert np.abs(dens / dens.mean() - 1.0).max() < 0.05


def test_ginibre_determinism_and_cap():
    a = sample_ginibre(16, seed=1)
    b = sample_ginibre(16, seed=1)
    assert np.array_equal(a.points, b.points)
    with pytest.raises(ValueError):
        sample_ginibre(2048)


# --- lattices -----------------------------------------------------------------

def test_lattice_z1d_example():
    w = Window(center=(5.0,), sides=(10.0,))
    c = lattice_config("Z_1D", 1.0, w)
    assert np.allclose(c.points.ravel(), np.arange(10) + 0.5)


def test_lattice_square_spacing():
    w = Window(center=(0.0, 0.0), sides=(10.0, 10.0))
    c = lattice_config("SQUARE_2D", 4.0, w)
    assert c.n == 400
    xs = np.unique(np.round(c.points[:, 0], 12))
    assert np.allclose(np.diff(xs), 0.5)


def test_lattice_triangular_nn_distance():
    w = Window(center=(0.0, 0.0), sides=(20.0, 20.0))
    c = lattice_config("TRIANGULAR_2D", 1.0, w)
    from scipy.spatial import cKDTree
    d, _ = cKDTree(c.points).query(c.points, k=2)
    assert np.allclose(d[:, 1], (2.0 / math.sqrt(3.0)) ** 0.5, rtol=1e-9)
    # density ~ 1 per unit area
    assert c.n == pytest.approx(400, rel=0.06)


def test_lattice_rejects_unknown():
    with pytest.raises(ValueError):
        lattice_config("HEX", 1.0, Window(center=(0.0, 0.0), sides=(2.0, 2.0)))


# --- quantile configuration ----------------------------------------------------

def test_quantile_uniform():
    from rgl import EquilibriumMeasure, GridSpec, KernelSpec, LOG, PotentialSpec
    grid = GridSpec(extent=((0.0, 1.0),), h=0.001)
    dens = np.ones(grid.shape[0])
    mu = EquilibriumMeasure(kernel=KernelSpec(d=1, s=LOG),
                            potential=PotentialSpec(kind="quadratic", a=1.0),
                            grid=grid, density=dens, zeta=np.zeros_like(dens),
                            support_mask=dens > 0, energy_I=1.5, frostman_c=0.0)
    c = quantile_config(mu, 4)
    assert np.allclose(c.points.ravel(), [0.125, 0.375, 0.625, 0.875], atol=1e-9)


def test_quantile_semicircle_symmetry(mu_1d):
    c = quantile_config(mu_1d, 5)
    assert c.points[2, 0] == pytest.approx(0.0, abs=1e-6)
    assert np.all(np.diff(c.points[:, 0]) > 0)
