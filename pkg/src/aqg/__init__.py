"""Pseudo-spectral laboratory for the anisotropic surface quasi-geostrophic equation."""

from .spectral import (
    DissipationParams,
    GridSpec,
    SobolevIndex,
    SpectralField,
    VelocityField,
    dissipation_symbol,
    forward_transform,
    fractional_laplacian,
    fractional_partial,
    friedrichs_project,
    inverse_transform,
    riesz_velocity,
    sobolev_norm,
)
from .dynamics import (
    BlowUpError,
    GalerkinLevel,
    InitialData,
    StepperConfig,
    TrajectoryState,
    evolve,
    galerkin_rhs,
    nonlinear_term,
    split_initial_data,
    step,
    trajectory,
    two_trajectory_gap,
)
from .diagnostics import (
    classify_region,
    critical_exponent,
    decay_report,
    energy_ledger,
    frequency_split,
)

__version__ = "0.1.0"
