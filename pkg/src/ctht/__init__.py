"""Harmonic analysis on the Jacobi hypergroup.

Characters, the generalized Fourier transform with its Plancherel density,
spectral translation, moduli of continuity, Besov-type seminorms and a
harness that checks transform inequalities numerically.
"""

from .besov import BesovSpec, DecayProfile, besov_seminorm, decay_exponent, membership
from .characters import character_bound_constant, jacobi_phi, ode_residual, phi_matrix
from .errors import AccuracyError, ConfigurationError, CthtError, DomainError
from .hypergeometric import gauss_2f1
from .hypergroup import (DensityBounds, JacobiParams, check_density_bounds, log_derivative_A,
                         plancherel_density, weight_A)
from .quadrature import QuadratureSpec
from .spectral import (GridFunction, Spectrum, forward_transform, inverse_transform, lp_norm_spectral,
                       lp_norm_weighted, modulus_of_continuity, translate)
from .verify import InequalityReport, ScenarioConfig, g_weight, run_scenario

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "BesovSpec", "ConfigurationError", "CthtError", "DecayProfile", "DensityBounds",
    "DomainError", "GridFunction", "InequalityReport", "JacobiParams", "QuadratureSpec", "ScenarioConfig",
    "Spectrum", "besov_seminorm", "character_bound_constant", "check_density_bounds", "decay_exponent",
    "forward_transform", "g_weight", "gauss_2f1", "inverse_transform", "jacobi_phi", "log_derivative_A",
    "lp_norm_spectral", "lp_norm_weighted", "membership", "modulus_of_continuity", "ode_residual",
    "phi_matrix", "plancherel_density", "run_scenario", "translate", "weight_A",
]
