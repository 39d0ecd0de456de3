"""Adiabatic coherent population return in two-level and Lambda systems."""
__version__ = "0.1.0"

from .adiabaticity import classify_detunings, gap_functions, gap_report, two_level_adiabatic
from .errors import (
    AdiapulseError,
    EmptyTable,
    IllConditioned,
    NumericalError,
    ToleranceNotMet,
    ZeroDetuning,
    ZeroDipole,
)
from .frame import (
    adiabatic_basis,
    analytic_couplings,
    cubic_coefficients,
    frame_trajectory,
    lambda_eigenvalues,
    nonadiabatic_couplings,
    two_level_frame,
)
from .hamiltonian import h_lambda, h_two_level
from .params import (
    INFINITY_SIGMA,
    LambdaSystem,
    PulseEnvelope,
    TimeGrid,
    TwoLevelSystem,
    effective_duration,
    envelope_at,
)
from .propagator import cpr_population_analytic, propagate_lambda, propagate_two_level
from .sweep import GridSpec, MapResult, detuning_map, figure_preset, rabi_map
