# %%
# Free energy by thermodynamic integration
# ========================================
#
# log Z is estimated along the path H_lam = lam H_N + (1 - lam) H_ref
# with the Gaussian reference H_ref = N sum |x|^2 / 2.  Subtracting the
# known leading terms, a_N = (log Z + (beta/2) N^2 I)/N - (beta/2d) log N
# converges, and its successive differences |a_2N - a_N| shrink: the
# next-order (order N) coefficient of the free-energy expansion exists.

import numpy as np

from rgl import GridSpec, KernelSpec, LOG, PotentialSpec, solve_equilibrium
from rgl.gas import GasModel
from rgl.sampler import exact_logZ_small_N, thermo_integrate_logZ

k = KernelSpec(d=1, s=LOG)
V = PotentialSpec(kind="quadratic", a=0.5)
mu = solve_equilibrium(V, k, GridSpec(extent=((-4.0, 4.0),), h=8.0 / 2000))
beta = 2.0

# %%
# sanity at N = 2 against brute-force quadrature
lam_grid = sorted(set(np.concatenate([[0.0, 1.0], np.linspace(0, 1, 96) ** 5])))
M2 = GasModel(kernel=k, potential=V, mu=mu, N=2, beta=beta)
res2 = thermo_integrate_logZ(M2, lam_grid, n_burn=400, n_sweeps=4000, thin=2,
                             seed=5)
exact2, _ = exact_logZ_small_N(M2)
print(f"N=2: TI {res2['logZ']:.5f} +- {res2['stderr']:.5f} "
      f"vs quadrature {exact2:.5f}")

# %%
# the expansion trend
a_prev = None
for N in (8, 16, 32, 64):
    M = GasModel(kernel=k, potential=V, mu=mu, N=N, beta=beta)
    res = thermo_integrate_logZ(M, lam_grid, n_burn=600,
                                n_sweeps=4000 if N <= 16 else 8000,
                                thin=2, seed=100 + N)
    a_N = (res["logZ"] + 0.5 * beta * N ** 2 * mu.energy_I) / N \
        - (beta / 2.0) * np.log(N)
    diff = "" if a_prev is None else f"  |a_N - a_prev| = {abs(a_N - a_prev):.4f}"
    print(f"N={N:3d}: logZ = {res['logZ']:10.3f}  a_N = {a_N:.4f}{diff}")
    a_prev = a_N
