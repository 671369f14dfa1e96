"""Moment oracles.

For every order M the moments of the limit density factor as

    m_M = K_M * integral of w**M g(w) dw,

where K_M is the M-th moment of rho0.  K_M is available exactly as a
per-period average of diagonal entries of L**M, which gives a check on rho
that shares no code with the density quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bands import BandStructure, rho0_moment
from .coeffs import PeriodicCoefficients, build_periodic_window
from .density import integrate_rho
from .scaling import ScalingSpec, omega_moment
from .spectrum import SpectrumResult


@dataclass(frozen=True)
class MomentReport:
    M: int
    K_M: float
    omega_factor: float
    m_M_theory: float
    m_M_empirical: float | None = None
    abs_error: float | None = None

    def row(self) -> tuple:
        return (self.M, self.K_M, self.omega_factor, self.m_M_theory, self.m_M_empirical, self.abs_error)


def periodic_moment(coeffs: PeriodicCoefficients, M: int) -> float:
    """(1/t) * sum_i (L**M e_{c+i}, e_{c+i}) on a window wide enough to be exact."""
    if M < 0:
        raise ValueError(f"M must be nonnegative, got {M}")
    t = coeffs.t
    half = M + 1 + t
    window = build_periodic_window(coeffs, half)
    total = 0.0
    for i in range(t):
        c = half + i
        v = np.zeros(window.m)
        v[c] = 1.0
        for _ in range(M):
            v = window.matvec(v)
        if v[0] != 0.0 or v[-1] != 0.0:
            raise RuntimeError("power vector reached the window boundary")
        total += v[c]
    return float(total / t)


def periodic_moment_quadrature(bands: BandStructure, M: int) -> float:
    """K_M as the integral of x**M rho0(x) over the bands."""
    if M < 0:
        raise ValueError(f"M must be nonnegative, got {M}")
    return rho0_moment(bands, M)


def theorem_moment(coeffs: PeriodicCoefficients, scaling: ScalingSpec, M: int) -> float:
    return periodic_moment(coeffs, M) * omega_moment(scaling, M)


def empirical_moment(spec: SpectrumResult | np.ndarray, M: int) -> float:
    values = spec.values if isinstance(spec, SpectrumResult) else np.asarray(spec, dtype=float)
    return float(np.mean(values**M))


def density_moment(bands: BandStructure, scaling: ScalingSpec, M: int) -> float:
    """Integral of z**M rho(z) over the support."""
    if M < 0:
        raise ValueError(f"M must be nonnegative, got {M}")
    if M == 0:
        return integrate_rho(bands, scaling)
    return integrate_rho(bands, scaling, weight=lambda z: z**M)


def moment_report(
    coeffs: PeriodicCoefficients,
    scaling: ScalingSpec,
    M: int,
    spec: SpectrumResult | None = None,
) -> MomentReport:
    K = periodic_moment(coeffs, M)
    w = omega_moment(scaling, M)
    theory = K * w
    if spec is None:
        return MomentReport(M, K, w, theory)
    emp = empirical_moment(spec, M)
    return MomentReport(M, K, w, theory, emp, abs(emp - theory))
