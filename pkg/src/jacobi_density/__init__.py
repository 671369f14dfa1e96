"""Asymptotic eigenvalue density of scaled, asymptotically periodic Jacobi matrices."""

from .bands import BandStructure, band_edges, discriminant, rho0, rho0_band_integral
from .coeffs import PeriodicCoefficients, TridiagonalMatrix, build_periodic_window, build_truncated
from .density import (
    DensityCurve,
    OmegaSupport,
    omega_support,
    rho,
    rho_at_zero,
    rho_closed_form_linear,
    rho_curve,
)
from .errors import (
    BandStructureError,
    ConfigError,
    NonConvergedQuadrature,
    UnsupportedForEmpirical,
)
from .moments import (
    MomentReport,
    density_moment,
    empirical_moment,
    moment_report,
    periodic_moment,
    periodic_moment_quadrature,
    theorem_moment,
)
from .scaling import ScalingKind, ScalingSpec, g_of, omega_moment, phi_of
from .spectrum import SpectrumResult, eigenvalues, histogram, ks_distance, scaled_spectrum

__all__ = [
    "BandStructure",
    "BandStructureError",
    "ConfigError",
    "DensityCurve",
    "MomentReport",
    "NonConvergedQuadrature",
    "OmegaSupport",
    "PeriodicCoefficients",
    "ScalingKind",
    "ScalingSpec",
    "SpectrumResult",
    "TridiagonalMatrix",
    "UnsupportedForEmpirical",
    "band_edges",
    "build_periodic_window",
    "build_truncated",
    "density_moment",
    "discriminant",
    "eigenvalues",
    "empirical_moment",
    "g_of",
    "histogram",
    "ks_distance",
    "moment_report",
    "omega_moment",
    "omega_support",
    "periodic_moment",
    "periodic_moment_quadrature",
    "phi_of",
    "rho",
    "rho0",
    "rho0_band_integral",
    "rho_at_zero",
    "rho_closed_form_linear",
    "rho_curve",
    "scaled_spectrum",
    "theorem_moment",
]
