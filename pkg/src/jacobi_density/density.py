"""Limiting eigenvalue density rho(z) of J(n)/phi(n).

rho is the superposition

    rho(z) = integral over (0, 1] of g(w) rho0(z/w) / w dw

restricted to the w with z/w in spec(L).  That set is a finite union of
intervals with ends at z/mu_j, z/nu_j or 1; enumerating it directly
reproduces every branch of the piecewise formula without coding the
branches one by one.

Inner integrals run in s = log(w): the measure dw/w becomes ds and an
endpoint where z/w meets a band edge e sits at x - e = e*expm1(-+d), which
keeps the inverse-square-root singularity resolvable at any distance d.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bands import BandStructure, rho0
from .errors import NonConvergedQuadrature
from .quadrature import tanh_sinh
from .scaling import ScalingSpec

INNER_RTOL = 1e-10
OUTER_RTOL = 1e-9
# outer nodes stop this close (relative) to 0 and the band edges; the mass cut off
# next to a z**(1/gamma - 1) singularity is about OUTER_MIN_DIST**(1/gamma)
OUTER_MIN_DIST = 1e-60
# absolute floor on the inner error, in units of 1/(support width); it only
# matters for values of rho that are themselves at rounding level, e.g. next
# to a kink of a tabulated g where w - kink carries no correct digits
RHO_ATOL = 1e-15


@dataclass(frozen=True)
class OmegaSupport:
    """Intervals of w in (0, 1] with z/w in spec(L).

    ``lo_edge``/``hi_edge`` give the index into ``BandStructure.edges`` that
    z/w reaches at each end, or None where the end is the cap w = 1.
    """

    intervals: tuple[tuple[float, float], ...]
    lo_edge: tuple[int | None, ...]
    hi_edge: tuple[int | None, ...]

    @property
    def empty(self) -> bool:
        return not self.intervals

    def singular_flags(self, bands: BandStructure) -> list[tuple[bool, bool]]:
        def sing(e):
            return e is not None and not bands.touching[e]

        return [(sing(lo), sing(hi)) for lo, hi in zip(self.lo_edge, self.hi_edge)]


def omega_support(z: float, bands: BandStructure) -> OmegaSupport:
    if z == 0:
        raise ValueError("omega_support is undefined at z = 0; use rho_at_zero")
    items = []
    for j, (mu, nu) in enumerate(bands.bands):
        if z > 0:
            if nu <= 0:
                continue
            lo, lo_e = z / nu, 2 * j + 1
            hi, hi_e = (z / mu, 2 * j) if mu > 0 else (math.inf, None)
        else:
            if mu >= 0:
                continue
            lo, lo_e = z / mu, 2 * j
            hi, hi_e = (z / nu, 2 * j + 1) if nu < 0 else (math.inf, None)
        if hi > 1.0:
            hi, hi_e = 1.0, None
        if lo < hi:
            items.append((lo, hi, lo_e, hi_e))
    items.sort()
    return OmegaSupport(
        tuple((lo, hi) for lo, hi, _, _ in items),
        tuple(e for _, _, e, _ in items),
        tuple(e for _, _, _, e in items),
    )


def _log_interval_integral(z, bands, scaling, lo, hi, lo_edge, hi_edge, rtol):
    # x = z/w at each end, exact where the end is a band edge
    x_lo = bands.edges[lo_edge] if lo_edge is not None else z / lo
    x_hi = bands.edges[hi_edge] if hi_edge is not None else z / hi
    # log(hi/lo) from the end values, so that x_lo*exp(-dl) and x_hi*exp(dr)
    # agree even when the interval is a few ulps wide
    length = math.log1p((x_lo - x_hi) / x_hi)
    if not length > 0:
        return 0.0

    def f(s, dl, dr):
        # x_lo*expm1(-dl) cancels against x_lo once dl is O(1); the right-hand
        # form x_hi*exp(dr) never cancels
        left = (dl <= dr) & (dl < 0.5)
        anchor = np.where(left, x_lo, x_hi)
        offset = np.where(left, x_lo * np.expm1(-dl), x_hi * np.expm1(dr))
        omega = np.minimum(z / (anchor + offset), 1.0)
        return scaling.g_array(omega) * bands.rho0_nearest(anchor, offset)

    return tanh_sinh(f, 0.0, length, rtol=rtol, atol=1e-300, raise_on_fail=False)


def _omega_pieces(support: OmegaSupport, scaling: ScalingSpec):
    """Split support intervals at the kinks of g, passing edge markers to the outer pieces."""
    kinks = scaling.breakpoints()
    for (lo, hi), le, he in zip(support.intervals, support.lo_edge, support.hi_edge):
        cuts = [lo] + [w for w in kinks if lo < w < hi] + [hi]
        for k in range(len(cuts) - 1):
            yield cuts[k], cuts[k + 1], (le if k == 0 else None), (he if k == len(cuts) - 2 else None)


def rho(z: float, bands: BandStructure, scaling: ScalingSpec, rtol: float = INNER_RTOL) -> float:
    """Limiting density at z; ``inf`` where it diverges."""
    if scaling.is_constant:
        return rho0(bands, z)
    if z == 0:
        return rho_at_zero(bands, scaling)
    support = omega_support(z, bands)
    total = err = 0.0
    try:
        for lo, hi, le, he in _omega_pieces(support, scaling):
            v, e = _log_interval_integral(z, bands, scaling, lo, hi, le, he, rtol)
            total += v
            err += e
    except NonConvergedQuadrature as exc:
        exc.z = z
        raise
    # judged on the sum: a sliver piece left between a kink of g and a band
    # edge cannot reach a relative target on its own, and need not
    lo, hi = support_hull(bands, scaling)
    if not err <= rtol * abs(total) + RHO_ATOL / (hi - lo):
        raise NonConvergedQuadrature(f"rho({z!r}) missed tolerance: estimate {total!r}, error {err!r}", total, err, z)
    return total


def rho_at_zero(bands: BandStructure, scaling: ScalingSpec) -> float:
    """rho(0): rho0(0) times the integral of g(w)/w, or ``inf`` when that diverges."""
    r0 = rho0(bands, 0.0)
    if scaling.is_constant or r0 == 0.0:
        return r0
    weight = scaling.inverse_moment()
    return math.inf if math.isinf(r0) or math.isinf(weight) else r0 * weight


def support_hull(bands: BandStructure, scaling: ScalingSpec) -> tuple[float, float]:
    """Smallest interval outside which rho vanishes."""
    lo, hi = bands.edges[0], bands.edges[-1]
    if scaling.is_constant:
        return lo, hi
    return min(lo, 0.0), max(hi, 0.0)


def _breakpoints(bands: BandStructure, scaling: ScalingSpec) -> list[float]:
    lo, hi = support_hull(bands, scaling)
    pts = set(bands.edges)
    if not scaling.is_constant:
        pts.add(0.0)
        # a kink of g at w_k puts a kink of rho at every e * w_k
        pts.update(e * w for e in bands.edges for w in scaling.breakpoints())
    return sorted(p for p in pts if lo <= p <= hi)


def integrate_rho(bands: BandStructure, scaling: ScalingSpec, weight=None, rtol: float = OUTER_RTOL) -> float:
    """Integral of weight(z) * rho(z) over the support, split at 0 and the band edges."""
    if scaling.is_constant:
        from .bands import _band_integrand

        total = 0.0
        for i, (lo, hi) in enumerate(bands.bands):
            if hi > lo:
                total += tanh_sinh(_band_integrand(bands, i, weight), lo, hi, rtol=rtol, atol=1e-15)[0]
        return total

    def f(z, dl, dr):
        vals = np.array([rho(float(v), bands, scaling) for v in z])
        return vals if weight is None else vals * weight(z)

    pts = _breakpoints(bands, scaling)
    total = 0.0
    for p, q in zip(pts[:-1], pts[1:]):
        if q > p:
            total += tanh_sinh(f, p, q, rtol=rtol, atol=1e-15, min_dist=OUTER_MIN_DIST)[0]
    return total


def rho_cdf(z: float, bands: BandStructure, scaling: ScalingSpec, rtol: float = 1e-10) -> float:
    """Mass of rho on (-inf, z].

    rho is the law of w*X with w ~ g and X ~ rho0 independent, so the CDF is
    the g-average of the periodic CDF at z/w.
    """
    if scaling.is_constant:
        return float(bands.band_cdf(np.array([z]))[0])
    if z == 0:
        return float(bands.band_cdf(np.array([0.0]))[0])
    edges = bands.edges
    if z > 0:
        top = edges[-1]
        if top <= 0:
            return 1.0
        # w < z/top puts z/w above the spectrum, where the periodic CDF is 1
        start = min(z / top, 1.0)
        total = float(scaling.g_cdf(start))
        cuts = [z / e for e in edges if e > 0 and start < z / e < 1.0]
    else:
        bottom = edges[0]
        if bottom >= 0:
            return 0.0
        start = min(z / bottom, 1.0)
        total = 0.0
        cuts = [z / e for e in edges if e < 0 and start < z / e < 1.0]
    cuts += [w for w in scaling.breakpoints() if start < w < 1.0]
    pts = sorted(set([start, 1.0] + cuts))

    def f(w, dl, dr):
        return scaling.g_array(w) * bands.band_cdf(z / w)

    for p, q in zip(pts[:-1], pts[1:]):
        if q > p:
            total += tanh_sinh(f, p, q, rtol=rtol, atol=1e-14)[0]
    return total


@dataclass(frozen=True, eq=False)
class DensityCurve:
    z: np.ndarray
    rho: np.ndarray
    singular: np.ndarray

    def rows(self):
        for z, r, s in zip(self.z, self.rho, self.singular):
            yield float(z), float(r), bool(s)


def rho_curve(
    bands: BandStructure,
    scaling: ScalingSpec,
    zmin: float,
    zmax: float,
    npoints: int,
    threads: int = 1,
) -> DensityCurve:
    """Evaluate rho on a uniform grid; points where it diverges are flagged singular."""
    if not zmin < zmax:
        raise ValueError("zmin must be smaller than zmax")
    if npoints < 2:
        raise ValueError("npoints must be at least 2")
    z = np.linspace(zmin, zmax, npoints)

    def one(v):
        return rho(float(v), bands, scaling)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            vals = np.array(list(pool.map(one, z)))
    else:
        vals = np.array([one(v) for v in z])
    return DensityCurve(z, vals, np.isinf(vals))


# Period-one formulas in the variables a = a_0, b = 2 b_0.


def _check_ab(a: float, b: float):
    if a < 0 or b <= 0:
        raise ValueError(f"need a >= 0 and b > 0, got a={a!r}, b={b!r}")


def rho_closed_form_linear(a: float, b: float, z: float) -> float:
    """Elementary density for t = 1 and phi(n) = n.

    a < b gives the arccosh profile of contracted Meixner-Pollaczek zeros,
    a > b the flat-plus-arccos profile of contracted Meixner zeros.
    """
    _check_ab(a, b)
    if a == b:
        raise ValueError("closed form degenerates at a == b (r = 0)")
    r2 = abs(a * a - b * b)
    r = math.sqrt(r2)
    if a < b:
        if not (a - b <= z <= a + b):
            return 0.0
        if z == 0:
            return math.inf
        arg = abs(r2 / (z * b) + a / b)
        return math.acosh(max(arg, 1.0)) / (math.pi * r)
    if 0.0 <= z <= a - b:
        return 1.0 / r
    if a - b < z <= a + b:
        arg = min(max(-r2 / (z * b) + a / b, -1.0), 1.0)
        return math.acos(arg) / (math.pi * r)
    return 0.0


def rho_period_one(a: float, b: float, scaling: ScalingSpec, z: float, rtol: float = 1e-12) -> float:
    """Period-one density for a general profile g, by the one-dimensional integrals.

    The quadratic under the root factors as ((a+b)w - z)((b-a)w + z), and the
    factor vanishing at an integration limit is evaluated from the endpoint
    distance.
    """
    _check_ab(a, b)
    if scaling.is_constant:
        raise ValueError("use rho0 for constant scaling")
    if z == 0:
        if a >= b:
            raise ValueError("z = 0 is not evaluated in the a > b branch")
        return scaling.inverse_moment() / (math.pi * math.sqrt(b * b - a * a))
    g = scaling.g_array
    if a <= b:
        if not (a - b <= z <= a + b):
            return 0.0
        if z > 0:
            lo = z / (a + b)

            def f(w, dl, dr):
                return g(w) / np.sqrt((a + b) * dl * ((b - a) * w + z))
        else:
            lo = z / (a - b)

            def f(w, dl, dr):
                return g(w) / np.sqrt(((a + b) * w - z) * (b - a) * dl)

        return tanh_sinh(f, lo, 1.0, rtol=rtol, atol=1e-300)[0] / math.pi
    if a - b <= z <= a + b:
        lo = z / (a + b)

        def f(w, dl, dr):
            return g(w) / np.sqrt((a + b) * dl * ((z - (a - b)) + (a - b) * dr))

        return tanh_sinh(f, lo, 1.0, rtol=rtol, atol=1e-300)[0] / math.pi
    if 0 < z < a - b:
        c = (a - b) / (a + b)
        scale = z / (a - b)

        def f(w, dl, dr):
            return g(w * scale) / np.sqrt((a + b) * dl * (a - b) * dr)

        return tanh_sinh(f, c, 1.0, rtol=rtol, atol=1e-300)[0] / math.pi
    return 0.0


def rho_power_t1(a: float, b: float, gamma: float, z: float, rtol: float = 1e-12) -> float:
    """Period-one density for phi(n) = n**gamma and a > b via the profile h.

    On [0, a-b] the density is h(a-b) (z/(a-b))**(1/gamma - 1); above it, h(z).
    """
    _check_ab(a, b)
    if not a > b:
        raise ValueError("the h-form applies to a > b only")
    expo = 1.0 / gamma - 1.0

    def h(v):
        lo = v / (a + b)

        def f(w, dl, dr):
            return w**expo / np.sqrt((a + b) * dl * ((v - (a - b)) + (a - b) * dr))

        return tanh_sinh(f, lo, 1.0, rtol=rtol, atol=1e-300)[0] / (math.pi * gamma)

    if 0 < z <= a - b:
        return h(a - b) * (z / (a - b)) ** expo
    if a - b < z <= a + b:
        return h(z)
    return 0.0
