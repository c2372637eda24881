"""Finite-N energy layer: Hamiltonian, Gibbs log-density, incremental moves,
and the exact next-order energy W_N obtained by inverting the splitting
identity

    H_N = N^2 I(mu_V) [- (N/d) log N]  + 2N sum_i zeta(x_i) + N^(1+s/d) W_N,

with the bracketed log correction present only for logarithmic kernels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import EquilibriumMeasure, PotentialSpec, potential_of_measure
from .kernels import Configuration, KernelSpec, Scale


@dataclass(frozen=True)
class GasModel:
    """Kernel + potential + solved equilibrium measure + (N, beta)."""

    kernel: KernelSpec
    potential: PotentialSpec
    mu: EquilibriumMeasure
    N: int
    beta: float

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.mu.kernel != self.kernel:
            raise ValueError("equilibrium measure was solved for a different kernel")
        if self.mu.potential != self.potential:
            raise ValueError("equilibrium measure was solved for a different potential")

    @property
    def temperature_prefactor(self):
        """(beta/2) N^(-s/d), with s = 0 in the logarithmic cases."""
        return 0.5 * self.beta * self.N ** (-self.kernel.s_eff / self.kernel.d)

    def with_beta(self, beta):
        return GasModel(self.kernel, self.potential, self.mu, self.N, beta)


@dataclass(frozen=True)
class EnergyBreakdown:
    """Terms of the exact splitting of H_N; identity holds by construction."""

    H_N: float
    leading: float         # N^2 I(mu_V)
    log_correction: float  # -(N/d) log N for log kernels, else 0
    zeta_term: float       # 2N sum_i zeta(x_i)
    W_N: float

    def identity_residual(self, model: GasModel):
        k = model.kernel
        scale = model.N ** (1.0 + k.s_eff / k.d)
        recomposed = self.leading + self.log_correction + self.zeta_term + scale * self.W_N
        return (recomposed - self.H_N) / max(1.0, abs(self.H_N))

    def as_row(self):
        return (self.H_N, self.leading, self.log_correction, self.zeta_term, self.W_N)

    CSV_FIELDS = ("H_N", "leading", "log_correction", "zeta_term", "W_N")


def _require_macro(C: Configuration, model: GasModel):
    if C.scale is not Scale.MACRO:
        raise ValueError("gas energies are defined on MACRO-scale configurations")
    if C.n != model.N:
        raise ValueError(f"configuration has {C.n} points, model expects {model.N}")
    if C.d != model.kernel.d:
        raise ValueError(f"configuration dimension {C.d} != kernel dimension {model.kernel.d}")


def pair_energy(points, k: KernelSpec):
    """sum over ordered pairs of g(|x_i - x_j|); +inf on coincidence."""
    n = points.shape[0]
    if n < 2:
        return 0.0
    diff = points[:, None, :] - points[None, :, :]
    r = np.sqrt((diff ** 2).sum(axis=-1))
    iu = np.triu_indices(n, k=1)
    rij = r[iu]
    if np.any(rij == 0.0):
        return float("inf")
    if k.is_log:
        vals = -np.log(rij)
    else:
        vals = rij ** (-float(k.s))
    return float(2.0 * vals.sum())


def hamiltonian(C: Configuration, model: GasModel):
    """H_N = sum_{i != j} g(x_i - x_j) + N sum_i V(x_i)."""
    _require_macro(C, model)
    pe = pair_energy(C.points, model.kernel)
    if not math.isfinite(pe):
        return float("inf")
    vsum = float(np.sum(model.potential(C.points)))
    return pe + model.N * vsum


def gibbs_log_density(C: Configuration, model: GasModel):
    """Unnormalized log of the Gibbs density: -(beta/2) N^(-s/d) H_N."""
    H = hamiltonian(C, model)
    if not math.isfinite(H):
        return float("-inf")
    return -model.temperature_prefactor * H


def delta_hamiltonian(C: Configuration, i, x_new, model: GasModel):
    """H_N after moving particle i to x_new, minus H_N before; O(N).

    Coincidence of x_new with another particle gives a flagged +inf delta.
    """
    _require_macro(C, model)
    pts = C.points
    x_new = np.asarray(x_new, dtype=float).reshape(-1)
    if x_new.shape[0] != C.d:
        raise ValueError("x_new has wrong dimension")
    if not 0 <= i < C.n:
        raise IndexError(f"particle index {i} out of range")
    others = np.delete(np.arange(C.n), i)
    if len(others) > 0:
        r_new = np.sqrt(((pts[others] - x_new[None, :]) ** 2).sum(axis=1))
        if np.any(r_new == 0.0):
            return float("inf")
        r_old = np.sqrt(((pts[others] - pts[i][None, :]) ** 2).sum(axis=1))
        k = model.kernel
        if k.is_log:
            dpair = float(np.sum(np.log(r_old) - np.log(r_new)))
        else:
            s = float(k.s)
            dpair = float(np.sum(r_new ** (-s) - r_old ** (-s)))
    else:
        dpair = 0.0
    dv = float(np.sum(model.potential(x_new[None, :]))
               - np.sum(model.potential(pts[i][None, :])))
    return 2.0 * dpair + model.N * dv


def zeta_at_points(model: GasModel, points):
    """zeta at macro points: grid interpolation inside, direct sum outside.

    Points farther than one grid width beyond the box are considered lost
    (the chain has escaped the confinement region) and raise.
    """
    mu = model.mu
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    lo = np.array([e[0] for e in mu.grid.extent])
    hi = np.array([e[1] for e in mu.grid.extent])
    width = hi - lo
    far = np.any((pts < lo - width) | (pts > hi + width), axis=1)
    if far.any():
        offenders = np.flatnonzero(far).tolist()
        raise ValueError(f"points far outside the equilibrium grid (zeta unavailable): "
                         f"indices {offenders}")
    inside = mu.grid.contains(pts)
    out = np.empty(pts.shape[0])
    if inside.any():
        out[inside] = np.atleast_1d(mu.grid.interpolate(mu.zeta, pts[inside]))
    if (~inside).any():
        xs = pts[~inside]
        H = np.atleast_1d(potential_of_measure(mu, xs))
        Vx = np.atleast_1d(model.potential(xs))
        out[~inside] = H + Vx / 2.0 - mu.frostman_c
    return out


def splitting_breakdown(C: Configuration, model: GasModel,
                        H_N=None) -> EnergyBreakdown:
    """Exact splitting of H_N; W_N is defined by inverting the identity.

    Pass a precomputed H_N to skip the O(N^2) pair sum (trace replay).
    """
    _require_macro(C, model)
    if H_N is None:
        H_N = hamiltonian(C, model)
    k = model.kernel
    N = model.N
    leading = N ** 2 * model.mu.energy_I
    log_correction = -(N / k.d) * math.log(N) if k.is_log else 0.0
    zeta_term = 2.0 * N * float(np.sum(zeta_at_points(model, C.points)))
    scale = N ** (1.0 + k.s_eff / k.d)
    W_N = (H_N - leading - log_correction - zeta_term) / scale
    return EnergyBreakdown(H_N=float(H_N), leading=float(leading),
                           log_correction=float(log_correction),
                           zeta_term=float(zeta_term), W_N=float(W_N))
