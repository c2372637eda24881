"""Shared fixtures: golden equilibrium measures and models.

The golden 1D case is the logarithmic gas in the quadratic well whose
equilibrium measure is the semicircle supported on [-2, 2] (quadratic
coefficient 1/2 under this Hamiltonian normalization); the golden 2D case
is the quadratic well whose equilibrium measure is uniform on the unit
disk (coefficient 1).
"""
import numpy as np
import pytest

from rgl import (GridSpec, KernelSpec, LOG, PotentialSpec, SolverOpts,
                 solve_equilibrium)
from rgl.gas import GasModel

GOLDEN_A_1D = 0.5
GOLDEN_A_2D = 1.0


@pytest.fixture(scope="session")
def kernel_1d():
    return KernelSpec(d=1, s=LOG)


@pytest.fixture(scope="session")
def kernel_2d():
    return KernelSpec(d=2, s=LOG)


@pytest.fixture(scope="session")
def potential_1d():
    return PotentialSpec(kind="quadratic", a=GOLDEN_A_1D)


@pytest.fixture(scope="session")
def mu_1d(kernel_1d, potential_1d):
    grid = GridSpec(extent=((-4.0, 4.0),), h=8.0 / 2000)
    return solve_equilibrium(potential_1d, kernel_1d, grid, SolverOpts())


@pytest.fixture(scope="session")
def mu_1d_fine(kernel_1d, potential_1d):
    grid = GridSpec(extent=((-4.0, 4.0),), h=8.0 / 4000)
    return solve_equilibrium(potential_1d, kernel_1d, grid, SolverOpts())


@pytest.fixture(scope="session")
def mu_2d(kernel_2d):
    V = PotentialSpec(kind="quadratic", a=GOLDEN_A_2D)
    grid = GridSpec(extent=((-1.5, 1.5), (-1.5, 1.5)), h=3.0 / 64)
    return solve_equilibrium(V, kernel_2d, grid, SolverOpts())


@pytest.fixture(scope="session")
def model_1d_factory(kernel_1d, potential_1d, mu_1d):
    def make(N, beta):
        return GasModel(kernel=kernel_1d, potential=potential_1d, mu=mu_1d,
                        N=N, beta=beta)
    return make


def semicircle_density(x):
    return np.where(np.abs(x) <= 2.0,
                    np.sqrt(np.maximum(4.0 - np.asarray(x) ** 2, 0.0)) / (2 * np.pi),
                    0.0)
