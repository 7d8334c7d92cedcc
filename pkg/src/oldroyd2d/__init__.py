"""Pseudo-spectral lab for a 2D inviscid, non-diffusive viscoelastic flow model.

Building blocks: a periodic spectral core (transforms, projection,
multipliers, norms), the closed-form per-mode linear propagator with an ODE
oracle, a semi-analytic whole-plane decay laboratory, a dealiased
integrating-factor nonlinear solver, energy-functional monitors, and a batch
experiment CLI.
"""

from .decay import (
    DecayFit,
    DecaySeries,
    InitialProfile,
    decay_series,
    fit_decay_exponent,
    gaussian_profile,
    linear_norm_quadrature,
    lower_bound_ratio,
)
from .fields import SpectralVectorField, SymmetricTensorField
from .grid import Grid
from .kernels import backend
from .monitors import EnergyReport, EtaCoefficients, balance_residual, evaluate, splitting_diagnostics
from .operators import (
    FrequencyCutoff,
    freq_split,
    hk_norm,
    lambda_power,
    leray_project,
    sigma_from_tau,
    sobolev_norm,
)
from .params import PhysParams
from .propagator import (
    GreenEval,
    ModeState,
    SpectralConstants,
    constants,
    eigenvalues,
    green_eval,
    mode_ode_oracle,
    propagate_mode,
)
from .solver import (
    BlowUpError,
    CFLViolationError,
    SimState,
    StepConfig,
    nonlinear_terms,
    new_state,
    pressure_field,
    random_state,
    run,
    step,
    taylor_green_state,
    zero_state,
)

__version__ = "0.1.0"

__all__ = [
    "BlowUpError",
    "CFLViolationError",
    "DecayFit",
    "DecaySeries",
    "EnergyReport",
    "EtaCoefficients",
    "FrequencyCutoff",
    "GreenEval",
    "Grid",
    "InitialProfile",
    "ModeState",
    "PhysParams",
    "SimState",
    "SpectralConstants",
    "SpectralVectorField",
    "StepConfig",
    "SymmetricTensorField",
    "backend",
    "balance_residual",
    "constants",
    "decay_series",
    "eigenvalues",
    "evaluate",
    "fit_decay_exponent",
    "freq_split",
    "gaussian_profile",
    "green_eval",
    "hk_norm",
    "lambda_power",
    "leray_project",
    "linear_norm_quadrature",
    "lower_bound_ratio",
    "mode_ode_oracle",
    "new_state",
    "nonlinear_terms",
    "pressure_field",
    "propagate_mode",
    "random_state",
    "run",
    "sigma_from_tau",
    "sobolev_norm",
    "splitting_diagnostics",
    "step",
    "taylor_green_state",
    "zero_state",
]
