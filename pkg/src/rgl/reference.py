"""Exact and constructive reference point processes used for validation:
Poisson, tridiagonal beta-Hermite (1D), Ginibre (2D), lattices and the
deterministic quantile configuration.

Scaling conventions.  The raw tridiagonal model (diagonal N(0,2)/sqrt(2),
off-diagonals chi_{beta k}/sqrt(2)) has eigenvalue density proportional to
prod |l_i - l_j|^beta exp(-sum l_i^2 / 2).  Dividing the eigenvalues by
sqrt(a * beta * N) makes the law coincide exactly with the gas measure for
the quadratic potential V(x) = a x^2; a = 1/2 targets the semicircle
supported on [-2, 2].  Likewise the eigenvalues of an N x N matrix of
i.i.d. CN(0, 1/N) entries follow the 2D beta = 2 gas with V(x) = |x|^2
(uniform circular law on the unit disk), and are divided by sqrt(a) for a
general quadratic coefficient.  Both constants are pinned by the N = 2
rejection oracle and the cross-law spacing tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .equilibrium import EquilibriumMeasure
from .kernels import Configuration, Scale

GINIBRE_MAX_N = 1024


@dataclass(frozen=True)
class Window:
    """Axis-aligned box given by center and side lengths."""

    center: tuple
    sides: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.center))
        s = tuple(float(v) for v in np.atleast_1d(self.sides))
        if len(c) != len(s):
            raise ValueError("center and sides must have the same dimension")
        if any(v <= 0 for v in s):
            raise ValueError("window sides must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "sides", s)

    @property
    def d(self):
        return len(self.center)

    @property
    def volume(self):
        return float(np.prod(self.sides))

    def bounds(self):
        lo = np.array(self.center) - 0.5 * np.array(self.sides)
        hi = np.array(self.center) + 0.5 * np.array(self.sides)
        return lo, hi

    def contains(self, pts):
        lo, hi = self.bounds()
        pts = np.atleast_2d(pts)
        return np.all((pts >= lo) & (pts < hi), axis=1)


def sample_poisson(intensity, window: Window, seed=0) -> Configuration:
    """Homogeneous Poisson process restricted to the window (micro scale)."""
    if intensity <= 0:
        raise ValueError("intensity must be positive")
    rng = np.random.default_rng([int(seed), 0x90])
    n = rng.poisson(intensity * window.volume)
    lo, hi = window.bounds()
    pts = lo + rng.random((n, window.d)) * (hi - lo)
    return Configuration(points=pts.reshape(n, window.d), scale=Scale.MICRO)


def sample_beta_hermite(N, beta, seed=0, a=0.5) -> Configuration:
    """Eigenvalues of the tridiagonal beta-Hermite model, rescaled so the
    law coincides with the 1D log-gas for V(x) = a x^2 (default: the
    quadratic potential whose equilibrium measure is the semicircle on
    [-2, 2])."""
    if N < 2:
        raise ValueError("need N >= 2")
    if beta <= 0:
        raise ValueError("beta must be positive")
    rng = np.random.default_rng([int(seed), 0xBE7A])
    diag = rng.normal(0.0, math.sqrt(2.0), size=N) / math.sqrt(2.0)
    kdx = np.arange(N - 1, 0, -1)
    off = np.sqrt(rng.chisquare(beta * kdx)) / math.sqrt(2.0)
    lam = eigh_tridiagonal(diag, off, eigvals_only=True)
    x = lam / math.sqrt(a * beta * N)
    return Configuration(points=np.sort(x).reshape(N, 1), scale=Scale.MACRO)


def sample_ginibre(N, seed=0, a=1.0) -> Configuration:
    """Eigenvalues of an N x N i.i.d. complex Gaussian matrix, scaled to the
    2D beta = 2 gas with V(x) = a|x|^2 (a = 1: circular law on the unit disk)."""
    if N < 2:
        raise ValueError("need N >= 2")
    if N > GINIBRE_MAX_N:
        raise ValueError(f"Ginibre sampler capped at N = {GINIBRE_MAX_N}")
    rng = np.random.default_rng([int(seed), 0x61])
    G = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) \
        / math.sqrt(2.0 * N)
    lam = np.linalg.eigvals(G) / math.sqrt(a)
    pts = np.column_stack([lam.real, lam.imag])
    return Configuration(points=pts, scale=Scale.MACRO)


def lattice_config(kind, density, window: Window) -> Configuration:
    """Lattice points of per-volume density m intersected with the window.

    Centered convention: points sit at cell centers, so counts match
    volume exactly when window sides are integer multiples of the spacing.
    """
    if density <= 0:
        raise ValueError("density must be positive")
    lo, hi = window.bounds()
    if kind == "Z_1D":
        if window.d != 1:
            raise ValueError("Z_1D needs a 1D window")
        spacing = 1.0 / density
        i0 = math.floor(lo[0] / spacing - 0.5) - 1
        i1 = math.ceil(hi[0] / spacing - 0.5) + 1
        xs = (np.arange(i0, i1 + 1) + 0.5) * spacing
        xs = xs[(xs >= lo[0]) & (xs < hi[0])]
        pts = xs.reshape(-1, 1)
    elif kind == "SQUARE_2D":
        if window.d != 2:
            raise ValueError("SQUARE_2D needs a 2D window")
        spacing = density ** -0.5
        axes = []
        for k in range(2):
            i0 = math.floor(lo[k] / spacing - 0.5) - 1
            i1 = math.ceil(hi[k] / spacing - 0.5) + 1
            axes.append((np.arange(i0, i1 + 1) + 0.5) * spacing)
        X, Y = np.meshgrid(*axes, indexing="ij")
        pts = np.column_stack([X.ravel(), Y.ravel()])
        pts = pts[window.contains(pts)]
    elif kind == "TRIANGULAR_2D":
        if window.d != 2:
            raise ValueError("TRIANGULAR_2D needs a 2D window")
        # unit cell area a^2 sqrt(3)/2 = 1/m
        aa = math.sqrt(2.0 / (math.sqrt(3.0) * density))
        v1 = np.array([aa, 0.0])
        v2 = np.array([aa / 2.0, aa * math.sqrt(3.0) / 2.0])
        span = max(hi[0] - lo[0], hi[1] - lo[1])
        nmax = int(span / (aa * math.sqrt(3.0) / 2.0)) + 4
        i = np.arange(-nmax, nmax + 1)
        I, J = np.meshgrid(i, i, indexing="ij")
        pts = (I.ravel()[:, None] * v1[None, :] + J.ravel()[:, None] * v2[None, :])
        pts = pts + np.array(window.center) - 0.0
        # re-center so a lattice point sits at the window center, then offset
        # by half a spacing (centered convention along v1)
        pts = pts + 0.5 * v1
        pts = pts[window.contains(pts)]
    else:
        raise ValueError(f"unknown lattice kind {kind!r}")
    return Configuration(points=pts, scale=Scale.MICRO)


def quantile_config(mu: EquilibriumMeasure, N) -> Configuration:
    """Deterministic crystal-like configuration x_i = F^{-1}((i - 1/2)/N)."""
    if mu.grid.d != 1:
        raise ValueError("quantile_config requires a 1D equilibrium measure")
    if N < 1:
        raise ValueError("N must be positive")
    q = (np.arange(N) + 0.5) / N
    x = mu.cdf_inverse(q)
    x = np.sort(x)
    return Configuration(points=x.reshape(N, 1), scale=Scale.MACRO)
