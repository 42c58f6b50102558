"""Temperature and density jump coefficients for the BGK Smoluchowski problem.

The wall reflects molecules diffusely with probability ``q`` and specularly
otherwise.  The half-space problem is recast as a vector Fredholm equation for
a spectral density ``E(k)`` and solved either as a power series in ``q``
(:func:`assemble_series`) or by direct fixed-point iteration
(:func:`solve_fixed_point`).
"""

from .direct import DirectSolution, fredholm_residual, solve_fixed_point
from .errors import (
    ConfigError,
    DivergenceError,
    DomainError,
    InconsistentEpsError,
    IntegrandError,
    SingularMatrixError,
)
from .fields import MomentProfile, boundary_distribution, macroscopic_profile, wall_moments
from .neumann import (
    Discretization,
    JumpResult,
    SeriesOrder,
    SpectralDensity,
    assemble_series,
    discretization,
    series_coefficients,
    zero_order_jumps,
)

__all__ = [
    "ConfigError",
    "DirectSolution",
    "Discretization",
    "DivergenceError",
    "DomainError",
    "InconsistentEpsError",
    "IntegrandError",
    "JumpResult",
    "MomentProfile",
    "SeriesOrder",
    "SingularMatrixError",
    "SpectralDensity",
    "assemble_series",
    "boundary_distribution",
    "discretization",
    "fredholm_residual",
    "macroscopic_profile",
    "series_coefficients",
    "solve_fixed_point",
    "wall_moments",
    "zero_order_jumps",
]
