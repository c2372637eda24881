# %%
# Reference point processes
# =========================
#
# Exact samplers used to validate the MCMC: the tridiagonal beta-Hermite
# model (whose eigenvalue law *is* the 1D gas for quadratic V), Ginibre
# eigenvalues (the 2D beta = 2 gas), Poisson, and lattices.

import numpy as np

from rgl import GridSpec, KernelSpec, LOG, PotentialSpec, solve_equilibrium
from rgl.fields import wasserstein1_to_measure
from rgl.reference import (Window, lattice_config, quantile_config,
                           sample_beta_hermite, sample_ginibre, sample_poisson)

# %%
# beta-Hermite: eigenvalues / sqrt(a beta N) follow the gas with V = a x^2
k = KernelSpec(d=1, s=LOG)
V = PotentialSpec(kind="quadratic", a=0.5)
mu = solve_equilibrium(V, k, GridSpec(extent=((-4.0, 4.0),), h=8.0 / 2000))
c = sample_beta_hermite(512, 2.0, seed=0)
print("beta-Hermite N=512: range", c.points.min(), c.points.max())
print("W1 to the semicircle:", wasserstein1_to_measure(c.points, mu))

# %%
# Ginibre: eigenvalues of an iid complex Gaussian matrix fill the unit disk
g = sample_ginibre(512, seed=1)
r = np.sqrt((g.points ** 2).sum(axis=1))
print("\nGinibre N=512: mean |z| =", r.mean(), " fraction outside 1.05:",
      np.mean(r > 1.05))

# %%
# Poisson and lattices at unit density
w = Window(center=(0.0, 0.0), sides=(16.0, 16.0))
p = sample_poisson(1.0, w, seed=2)
tri = lattice_config("TRIANGULAR_2D", 1.0, w)
print("\nPoisson count in 16x16:", p.n, "   triangular lattice count:", tri.n)

# %%
# quantile configuration: the deterministic 'crystal' adapted to mu_V
q = quantile_config(mu, 8)
print("\nquantile config N=8:", np.round(q.points.ravel(), 4))
