# %%
# Equilibrium measures of the log-gas
# ===================================
#
# The macroscopic density of a confined log/Riesz gas is the minimizer of
#     I(mu) = iint g(x-y) dmu(x) dmu(y) + int V dmu
# over probability measures.  The solver discretizes I with exact
# cell-pair averages of the singular kernel and certifies the minimizer
# through the Frostman conditions: zeta = H^mu + V/2 - c is >= 0
# everywhere and = 0 on the support.

import numpy as np

from rgl import (GridSpec, KernelSpec, LOG, PotentialSpec, SolverOpts,
                 frostman_residuals, solve_equilibrium, zeta_value)

# %%
# 1D: quadratic well V(x) = x^2/2 -> the semicircle on [-2, 2]
k1 = KernelSpec(d=1, s=LOG)
V1 = PotentialSpec(kind="quadratic", a=0.5)
grid1 = GridSpec(extent=((-4.0, 4.0),), h=8.0 / 2000)
mu1 = solve_equilibrium(V1, k1, grid1, SolverOpts(tolerance=5e-3))

x = grid1.axes()[0]
exact = np.where(np.abs(x) <= 2, np.sqrt(np.maximum(4 - x**2, 0)) / (2 * np.pi), 0)
print("energy I(mu_V)      :", mu1.energy_I, "(closed form: 3/4)")
print("Frostman constant c :", mu1.frostman_c, "(closed form: 1/2)")
print("L1 gap to semicircle:", np.sum(np.abs(mu1.density - exact)) * grid1.h)
print("residuals (neg, sup):", frostman_residuals(mu1))
print("density at 0        :", mu1.density_at(0.0), "= 1/pi?", 1 / np.pi)
print("zeta outside (x=3)  :", zeta_value(mu1, [[3.0]]), "> 0")

# %%
# 2D: V(x) = |x|^2 -> uniform density 1/pi on the unit disk
k2 = KernelSpec(d=2, s=LOG)
V2 = PotentialSpec(kind="quadratic", a=1.0)
grid2 = GridSpec(extent=((-1.5, 1.5), (-1.5, 1.5)), h=3.0 / 64)
mu2 = solve_equilibrium(V2, k2, grid2)

r = np.sqrt((grid2.centers_nd() ** 2).sum(axis=-1))
bulk = mu2.density[r < 0.8]
print("\n2D bulk density     :", bulk.mean(), "= 1/pi?", 1 / np.pi)
print("bulk flatness       :", (bulk.max() - bulk.min()) * np.pi, "(relative)")
print("support area        :", mu2.sigma_volume, "= pi?", np.pi)

# %%
# The same machinery handles Riesz kernels; s = 1 in d = 2 for instance.
k3 = KernelSpec(d=2, s=1.0)
mu3 = solve_equilibrium(V2, k3, GridSpec(extent=((-2.0, 2.0), (-2.0, 2.0)),
                                         h=4.0 / 56))
print("\nRiesz s=1, d=2      : I =", mu3.energy_I,
      " support area =", mu3.sigma_volume)
