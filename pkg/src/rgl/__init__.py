"""rgl: a simulation and analysis laboratory for log, Coulomb and Riesz gases."""

__version__ = "0.1.0"

from .kernels import (LOG, Configuration, KernelSpec, Scale, cds_constant,
                      close_pair_energy, kernel_value, scale_configuration,
                      truncated_kernel, truncation_excess)
from .equilibrium import (EquilibriumError, EquilibriumMeasure, GridSpec,
                          PotentialSpec, SolverOpts, frostman_residuals,
                          mean_field_energy, potential_of_measure,
                          solve_equilibrium, zeta_value)

__all__ = [
    "LOG", "Configuration", "KernelSpec", "Scale", "cds_constant",
    "close_pair_energy", "kernel_value", "scale_configuration",
    "truncated_kernel", "truncation_excess",
    "EquilibriumError", "EquilibriumMeasure", "GridSpec", "PotentialSpec",
    "SolverOpts", "frostman_residuals", "mean_field_energy",
    "potential_of_measure", "solve_equilibrium", "zeta_value",
]
