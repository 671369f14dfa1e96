"""Brute-force spectra of truncated matrices and their distance to the limit density."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bands import BandStructure
from .coeffs import PeriodicCoefficients, TridiagonalMatrix, build_truncated
from .density import rho_cdf
from .errors import UnsupportedForEmpirical
from .scaling import ScalingKind, ScalingSpec, phi_of

EIG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Sorted eigenvalues z_{k,n} of J(n)/phi(n)."""

    values: np.ndarray
    n: int
    t: int

    def __post_init__(self):
        if len(self.values) != self.n * self.t:
            raise ValueError("a spectrum of J(n) has exactly n*t eigenvalues")


def sturm_count(m: TridiagonalMatrix, x: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each shift in ``x``.

    Counts negative pivots of the LDL^T factorization of m - x, one shift per
    array entry.
    """
    x = np.asarray(x, dtype=float)
    d = m.diag
    e2 = m.offdiag**2
    tiny = np.finfo(float).tiny
    # pivots that vanish exactly are nudged so the recurrence continues
    floor = np.finfo(float).eps * max(m.inf_norm(), tiny)
    q = d[0] - x
    q = np.where(q == 0.0, -floor, q)
    count = (q < 0).astype(np.int64)
    for i in range(1, m.m):
        q = (d[i] - x) - e2[i - 1] / q
        q = np.where(q == 0.0, -floor, q)
        count += q < 0
    return count


def gershgorin_bounds(m: TridiagonalMatrix) -> tuple[float, float]:
    radius = np.zeros(m.m)
    radius[:-1] += np.abs(m.offdiag)
    radius[1:] += np.abs(m.offdiag)
    return float(np.min(m.diag - radius)), float(np.max(m.diag + radius))


def _bisect_indices(m: TridiagonalMatrix, idx: np.ndarray, lo: float, hi: float, tol: float) -> np.ndarray:
    """Bisect for eigenvalues with 0-based indices ``idx`` (ascending order).

    The step count depends only on (lo, hi, tol), so splitting the indices
    across threads cannot change any result bit.
    """
    a = np.full(idx.shape, lo)
    b = np.full(idx.shape, hi)
    steps = int(math.ceil(math.log2(max((hi - lo) / tol, 2.0)))) + 2
    for _ in range(steps):
        mid = 0.5 * (a + b)
        # count(mid) > k  <=>  the k-th eigenvalue lies below mid
        below = sturm_count(m, mid) > idx
        b = np.where(below, mid, b)
        a = np.where(below, a, mid)
    return 0.5 * (a + b)


def eigenvalues(m: TridiagonalMatrix, threads: int = 1) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix, ascending.

    Each eigenvalue is located independently by bisection on the Sturm count
    over the Gershgorin interval, to absolute accuracy 1e-12*max(1, ||m||_inf).
    Repeated eigenvalues come out once per index.
    """
    lo, hi = gershgorin_bounds(m)
    width = max(hi - lo, 1.0)
    lo -= 1e-3 * width
    hi += 1e-3 * width
    tol = EIG_TOL * max(1.0, m.inf_norm())
    idx = np.arange(m.m)
    if threads > 1 and m.m > threads:
        chunks = np.array_split(idx, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: _bisect_indices(m, c, lo, hi, tol), chunks))
        vals = np.concatenate(parts)
    else:
        vals = _bisect_indices(m, idx, lo, hi, tol)
    return np.sort(vals)


def scaled_spectrum(
    coeffs: PeriodicCoefficients, scaling: ScalingSpec, n: int, threads: int = 1
) -> SpectrumResult:
    """Eigenvalues of J(n) divided by the largest block scale phi(n-1)."""
    if scaling.kind is ScalingKind.TABULATED:
        raise UnsupportedForEmpirical("empirical spectra need phi itself; a tabulated g does not determine it")
    m = build_truncated(coeffs, scaling, n)
    vals = eigenvalues(m, threads=threads) / phi_of(scaling, n - 1)
    return SpectrumResult(vals, n, coeffs.t)


def ks_distance(spec: SpectrumResult, bands: BandStructure, scaling: ScalingSpec) -> float:
    """Kolmogorov-Smirnov distance between the eigenvalue ECDF and the limit CDF."""
    z = np.sort(spec.values)
    N = len(z)
    cdf = np.array([rho_cdf(float(v), bands, scaling) for v in z])
    above = np.arange(1, N + 1) / N - cdf
    below = cdf - np.arange(N) / N
    return float(max(above.max(), below.max(), 0.0))


def histogram(spec: SpectrumResult, nbins: int, lo: float, hi: float) -> np.ndarray:
    """Rows of (bin center, density); the densities integrate to the fraction of eigenvalues in [lo, hi]."""
    if nbins < 1:
        raise ValueError("nbins must be positive")
    if not lo < hi:
        raise ValueError("lo must be smaller than hi")
    counts, edges = np.histogram(spec.values, bins=nbins, range=(lo, hi))
    width = (hi - lo) / nbins
    centers = 0.5 * (edges[:-1] + edges[1:])
    return np.column_stack([centers, counts / (len(spec.values) * width)])
