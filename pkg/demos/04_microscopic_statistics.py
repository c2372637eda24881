# %%
# Microscopic statistics of the blown-up gas
# ==========================================
#
# Blowing configurations up by N^(1/d) around uniformly drawn tags in the
# support yields empirical fields.  On those windows we estimate number
# variance (hyperuniformity), spacings, pair correlation, and a
# specific-relative-entropy surrogate against the unit Poisson process.

import numpy as np

from rgl import GridSpec, KernelSpec, LOG, PotentialSpec, solve_equilibrium
from rgl.fields import (empirical_field, entropy_rate_estimate,
                        field_from_windows, number_variance_curve,
                        pair_correlation, spacing_histogram)
from rgl.gas import GasModel
from rgl.reference import Window, lattice_config, sample_beta_hermite, sample_poisson
from rgl.sampler import run_chain

k = KernelSpec(d=1, s=LOG)
V = PotentialSpec(kind="quadratic", a=0.5)
mu = solve_equilibrium(V, k, GridSpec(extent=((-4.0, 4.0),), h=8.0 / 2000))
model = GasModel(kernel=k, potential=V, mu=mu, N=256, beta=2.0)

# %%
ss = run_chain(model, n_burn=2000, n_sweeps=20_000, thin=200, seed=7)
wins, intens = [], []
for i, c in enumerate(ss.configs):
    f = empirical_field(c, model, n_tags=10, R_w=16.0, seed=i)
    wins.extend(f.windows)
    intens.append(f.intensities)
from rgl.fields import EmpiricalField
field = EmpiricalField(tags=np.zeros((len(wins), 1)), windows=tuple(wins),
                       window_radius=16.0, N=256,
                       intensities=np.concatenate(intens))

# %%
# hyperuniformity: the beta = 2 bulk has far-sub-Poisson number variance
for row in number_variance_curve(field, [4.0, 8.0, 16.0]):
    print(f"R={row['R']:5.1f}  Var[D]/R = {row['var'] / row['R']:.3f}")
pw = [sample_poisson(1.0, Window(center=(0.0,), sides=(32.0,)), seed=s)
      for s in range(2000)]
pf = field_from_windows(pw, 16.0, 1.0)
print("Poisson Var[D(16)]/16 =",
      number_variance_curve(pf, [16.0])[0]["var"] / 16.0)

# %%
# spacings: beta = 2 gas vs the tridiagonal ensemble, Poisson vs Exp(1)
gas_gaps = spacing_histogram(list(ss.configs), bulk_fraction=0.5)["gaps"]
tri = [sample_beta_hermite(256, 2.0, seed=s) for s in range(50)]
tri_gaps = spacing_histogram(tri, bulk_fraction=0.5)["gaps"]
from rgl.fields import ks_two_sample
print("KS(gas spacings, tridiagonal spacings) =",
      ks_two_sample(gas_gaps, tri_gaps))

# %%
# pair correlation shows the repulsion dip at short range
bins = np.linspace(0.0, 4.0, 17)
rows = pair_correlation(field, bins)
for row in rows[:6]:
    print(f"r={row['r']:5.2f}  g2={row['g2']:.3f}")

# %%
# entropy surrogate: 0 for Poisson, 1 - m + m log m for Poisson(m),
# large for lattices, in between for the gas
w16 = Window(center=(0.0,), sides=(16.0,))
p1 = [sample_poisson(1.0, w16, seed=s) for s in range(500)]
print("\nentropy Poisson(1):", entropy_rate_estimate(p1, 1.0, 16.0))
p2 = [sample_poisson(2.0, w16, seed=1000 + s) for s in range(500)]
print("entropy Poisson(2):", entropy_rate_estimate(p2, 1.0, 16.0),
      "(exact: 1 - 2 + 2 log 2 =", 1 - 2 + 2 * np.log(2), ")")
lat = [lattice_config("Z_1D", 1.0, w16) for _ in range(50)]
print("entropy lattice Z :", entropy_rate_estimate(lat, 0.5, 16.0))
print("entropy beta=2 gas:", entropy_rate_estimate(field, 1.0, 32.0))
