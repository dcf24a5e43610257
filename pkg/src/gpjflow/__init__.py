"""Lagrangian flow-map solver for the generalized Proudman-Johnson equation

    u_txx + u u_xxx - a u_x u_xx = 0   on [0, 1]

with blow-up detection, existence/blow-up criteria, closed-form oracles
and an independent Eulerian cross-check.
"""

__version__ = "0.1.0"

from .bracket import (ModelParams, bracket_value, integral_I, integral_J, integral_W, min_bracket,
                      psi_sq_integrable, psi_value)
from .criteria import CriteriaReport, classify, improved_root, reverse_bernoulli_gap
from .errors import (BeyondBlowup, BracketNonpositive, DomainError, GPJError, NumericalFailure,
                     QuadratureFailure, Undecidable)
from .eta import EtaTrajectory, eta_crit, eta_rhs, solve_eta
from .eulerian import VorticityState, compare, evolve, recover_velocity
from .flowmap import (FlowSnapshot, curvature_hat, flow_F, flow_Fxi, gradient_hat, sample_eulerian,
                      velocity_hat)
from .profiles import InitialProfile, extrema_ux, make_profile, moment_ux, norm

__all__ = [
    "BeyondBlowup", "BracketNonpositive", "CriteriaReport", "DomainError", "EtaTrajectory",
    "FlowSnapshot", "GPJError", "InitialProfile", "ModelParams", "NumericalFailure",
    "QuadratureFailure", "Undecidable", "VorticityState", "bracket_value", "classify", "compare",
    "curvature_hat", "eta_crit", "eta_rhs", "evolve", "extrema_ux", "flow_F", "flow_Fxi",
    "gradient_hat", "improved_root", "integral_I", "integral_J", "integral_W", "make_profile",
    "min_bracket", "moment_ux", "norm", "psi_sq_integrable", "psi_value", "recover_velocity",
    "reverse_bernoulli_gap", "sample_eulerian", "solve_eta", "velocity_hat",
]
