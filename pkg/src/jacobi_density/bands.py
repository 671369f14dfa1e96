"""Discriminant, band edges and spectral density of the periodic limit matrix L.

The discriminant S = p_t + q_{t-1} is the trace of the one-period transfer
matrix; spec(L) is the set where |S| <= 2, made of t bands whose edges solve
S(x) = +-2.  Inside the bands L has density |S'| / (t pi sqrt(4 - S^2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P

from .coeffs import PeriodicCoefficients
from .errors import BandStructureError
from .quadrature import tanh_sinh

EDGE_TOL = 1e-12
TOUCH_TOL = 1e-10  # relative to the spectral span
IMAG_TOL = 1e-5  # relative; looser than the final check since near-double roots split into complex pairs
MAX_POLISH = 60


def discriminant(coeffs: PeriodicCoefficients) -> Polynomial:
    """S(x) = p_t(x) + q_{t-1}(x) built by the polynomial three-term recurrence."""
    a, b, t = coeffs.a, coeffs.b, coeffs.t
    x = Polynomial([0.0, 1.0])
    p_prev, p = Polynomial([1.0]), (x - a[0]) / b[0]
    q_prev, q = Polynomial([0.0]), Polynomial([-b[t - 1] / b[0]])
    for k in range(1, t):
        p_prev, p = p, ((x - a[k]) * p - b[k - 1] * p_prev) / b[k]
        q_prev, q = q, ((x - a[k]) * q - b[k - 1] * q_prev) / b[k]
    # after the loop p = p_t and q_prev = q_{t-1}
    return Polynomial((p + q_prev).coef[: t + 1])


def discriminant_at(coeffs: PeriodicCoefficients, x: float) -> float:
    """S(x) by running the recurrence numerically at a fixed x."""
    a, b, t = coeffs.a, coeffs.b, coeffs.t
    p_prev, p = 1.0, (x - a[0]) / b[0]
    q_prev, q = 0.0, -b[t - 1] / b[0]
    for k in range(1, t):
        p_prev, p = p, ((x - a[k]) * p - b[k - 1] * p_prev) / b[k]
        q_prev, q = q, ((x - a[k]) * q - b[k - 1] * q_prev) / b[k]
    return p + q_prev


def discriminant_jet(coeffs: PeriodicCoefficients, x0: float, order: int | None = None) -> np.ndarray:
    """Taylor coefficients of S(x0 + d) in d up to ``order`` (default t, i.e. exact).

    Runs the recurrence on truncated power series in d, so the expansion is as
    accurate as the numeric recurrence at x0; expanding the monomial-basis S
    instead loses digits quickly as t grows.
    """
    a, b, t = coeffs.a, coeffs.b, coeffs.t
    n = (t if order is None else order) + 1

    def times_linear(c, v):
        # (v + d) * c, truncated
        out = v * c
        out[1:] += c[:-1]
        return out

    p_prev, p = np.zeros(n), np.zeros(n)
    p_prev[0] = 1.0
    p[0] = (x0 - a[0]) / b[0]
    if n > 1:
        p[1] = 1.0 / b[0]
    q_prev, q = np.zeros(n), np.zeros(n)
    q[0] = -b[t - 1] / b[0]
    for k in range(1, t):
        p_prev, p = p, (times_linear(p, x0 - a[k]) - b[k - 1] * p_prev) / b[k]
        q_prev, q = q, (times_linear(q, x0 - a[k]) - b[k - 1] * q_prev) / b[k]
    return p + q_prev


@dataclass(frozen=True, eq=False)
class BandStructure:
    """Sorted band edges mu_1 <= nu_1 <= ... <= mu_t <= nu_t of spec(L), plus S."""

    edges: tuple[float, ...]
    S: Polynomial
    t: int
    # S(edge), +2 or -2, per edge
    edge_values: tuple[float, ...] = field(default=())
    touching: tuple[bool, ...] = field(default=())
    # when known, local expansions come from the recurrence rather than from S
    coeffs: PeriodicCoefficients | None = field(default=None)

    def __post_init__(self):
        if len(self.edges) != 2 * self.t:
            raise BandStructureError(f"expected {2 * self.t} edges, got {len(self.edges)}")
        edges = tuple(float(e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        if not self.edge_values:
            vals = tuple(2.0 if self.S(e) > 0 else -2.0 for e in edges)
            object.__setattr__(self, "edge_values", vals)
        if not self.touching:
            touch = [False] * len(edges)
            for i in range(1, self.t):
                if edges[2 * i] - edges[2 * i - 1] <= TOUCH_TOL * self.span:
                    touch[2 * i - 1] = touch[2 * i] = True
            object.__setattr__(self, "touching", tuple(touch))
        # S(e + d) - S(e) as a polynomial in d, per edge; touching edges are
        # exact double roots so their linear term is dropped too.
        shifted = []
        for e, touch in zip(edges, self.touching):
            if self.coeffs is not None:
                c = discriminant_jet(self.coeffs, e)
            else:
                c = self.S(Polynomial([e, 1.0])).coef.copy()
                c = np.concatenate([c, np.zeros(self.t + 1 - len(c))])
            c[0] = 0.0
            if touch:
                c[1] = 0.0
            shifted.append(c)
        object.__setattr__(self, "_shifted", tuple(shifted))
        object.__setattr__(self, "_shifted_deriv", tuple(P.polyder(c) for c in shifted))

    @property
    def bands(self) -> list[tuple[float, float]]:
        return [(self.edges[2 * i], self.edges[2 * i + 1]) for i in range(self.t)]

    @property
    def span(self) -> float:
        return self.edges[-1] - self.edges[0]

    def contains(self, x: float) -> bool:
        return any(lo <= x <= hi for lo, hi in self.bands)

    def band_of(self, x: float) -> int | None:
        """0-based index of a band containing x (the lower one at a touching point)."""
        for i, (lo, hi) in enumerate(self.bands):
            if lo <= x <= hi:
                return i
        return None

    def touching_limit(self, edge: int) -> float:
        """Finite value of rho0 at a touching edge, where S' and 4 - S^2 both vanish."""
        c2 = self._shifted[edge][2] if self.t >= 2 else 0.0
        return math.sqrt(abs(c2)) / (self.t * math.pi)

    def rho0_offset(self, edge: int, delta: np.ndarray) -> np.ndarray:
        """rho0 at ``edges[edge] + delta`` for offsets pointing into the adjacent band.

        Uses the Taylor-shifted discriminant so that 4 - S^2 keeps full relative
        accuracy however small ``delta`` is.
        """
        delta = np.asarray(delta, dtype=float)
        s = self.edge_values[edge]
        pv = P.polyval(delta, self._shifted[edge])
        dpv = P.polyval(delta, self._shifted_deriv[edge])
        arg = -pv * (2.0 * s + pv)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.abs(dpv) / (self.t * math.pi * np.sqrt(arg))
        at_edge = delta == 0.0
        if np.any(at_edge):
            out = np.where(at_edge, self.touching_limit(edge) if self.touching[edge] else math.inf, out)
        bad = ~at_edge & ~(arg > 0)
        if np.any(bad):
            # rounding put a point that lies inside the band on the wrong side of |S| = 2
            out = np.where(bad, np.abs(dpv) / (self.t * math.pi * math.sqrt(np.finfo(float).tiny)), out)
        return out

    def rho0_nearest(self, anchor: np.ndarray, offset: np.ndarray) -> np.ndarray:
        """rho0 at x = anchor + offset, measuring x from its nearest edge as (anchor - edge) + offset.

        Callers that know x as a perturbation of some exact value keep the
        distance to a nearby edge accurate this way.
        """
        anchor = np.asarray(anchor, dtype=float)
        offset = np.asarray(offset, dtype=float)
        anchor, offset = np.broadcast_arrays(anchor, offset)
        x = anchor + offset
        edges = np.asarray(self.edges)
        k = np.argmin(np.abs(x[..., None] - edges), axis=-1)
        delta = (anchor - edges[k]) + offset
        # a point is inside band k//2 when it lies on the inner side of edge k
        inward = np.where(k % 2 == 0, delta >= 0, delta <= 0)
        if self.t > 1:
            touch = np.asarray(self.touching)[k]
            inward |= touch
        out = np.zeros(x.shape)
        for e in np.unique(k[inward]):
            sel = inward & (k == e)
            out[sel] = self.rho0_offset(int(e), delta[sel])
        return out

    def rho0_array(self, x: np.ndarray) -> np.ndarray:
        return self.rho0_nearest(x, 0.0)

    def S_nearest(self, x: np.ndarray) -> np.ndarray:
        """S(x) expanded about the nearest band edge."""
        x = np.asarray(x, dtype=float)
        edges = np.asarray(self.edges)
        k = np.argmin(np.abs(x[..., None] - edges), axis=-1)
        out = np.empty(x.shape)
        for e in np.unique(k):
            sel = k == e
            out[sel] = self.edge_values[e] + P.polyval(x[sel] - edges[e], self._shifted[e])
        return out

    def band_cdf(self, x: np.ndarray) -> np.ndarray:
        """Cumulative distribution of rho0, using arccos(+-S/2) inside each band."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for i, (lo, hi) in enumerate(self.bands):
            out = np.where(x > hi, (i + 1) / self.t, out)
            inside = (x >= lo) & (x <= hi)
            if np.any(inside):
                s0 = self.edge_values[2 * i]
                ratio = np.clip(self.S_nearest(x[inside]) * (s0 / 2.0) / 2.0, -1.0, 1.0)
                out[inside] = (i + np.arccos(ratio) / math.pi) / self.t
        return out


def _polish_simple(jet, x: float, s: float) -> float:
    for _ in range(MAX_POLISH):
        v, dh, _ = jet(x)
        h = v - s
        if dh == 0.0:
            break
        step = h / dh
        x_new = x - step
        if abs(jet(x_new)[0] - s) >= abs(h) and abs(step) <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            break
        x = x_new
        if abs(step) <= np.finfo(float).eps * max(1.0, abs(x)):
            break
    return x


def _critical_point(jet, x: float) -> float:
    for _ in range(MAX_POLISH):
        _, d1, half_d2 = jet(x)
        if half_d2 == 0.0:
            break
        step = d1 / (2.0 * half_d2)
        x -= step
        if abs(step) <= np.finfo(float).eps * max(1.0, abs(x)):
            break
    return x


def _eval_scale(S: Polynomial, x: float) -> float:
    return float(np.sum(np.abs(S.coef) * abs(x) ** np.arange(len(S.coef))))


def band_edges(S: Polynomial, t: int, coeffs: PeriodicCoefficients | None = None) -> BandStructure:
    """Solve S(x) = +-2 for the 2t band edges and pair them into bands.

    Roots of each factor S -+ 2 come from eigenvalues of its companion matrix,
    then get Newton-polished.  Close pairs of roots of the same factor are
    tested for a double root (touching bands) by locating the nearby critical
    point of S.  Given ``coeffs``, polishing evaluates S by the recurrence,
    which stays accurate for periods where the monomial coefficients do not.
    """
    S = Polynomial(np.trim_zeros(np.asarray(S.coef, dtype=float), "b"))
    if S.degree() != t:
        raise BandStructureError(f"discriminant has degree {S.degree()}, expected {t}")
    if coeffs is None:
        dS, d2S = S.deriv(), S.deriv(2)

        def jet(x):
            return S(x), dS(x), 0.5 * d2S(x)
    else:

        def jet(x):
            c = discriminant_jet(coeffs, x, 2)
            return c[0], c[1], (c[2] if len(c) > 2 else 0.0)
    found: list[tuple[float, float]] = []
    for s in (2.0, -2.0):
        comp = P.polycompanion((S - s).coef)
        raw = np.linalg.eigvals(comp) if t > 1 else np.array([-(S - s).coef[0] / (S - s).coef[1]])
        scale = max(1.0, float(np.max(np.abs(raw))))
        if np.any(np.abs(raw.imag) > IMAG_TOL * scale):
            raise BandStructureError(
                f"S(x) = {s:+g} has non-real roots {raw[np.abs(raw.imag) > IMAG_TOL * scale]}; "
                "the coefficients do not define a real periodic Jacobi matrix"
            )
        roots = np.sort(raw.real)
        k = 0
        while k < len(roots):
            if k + 1 < len(roots) and roots[k + 1] - roots[k] <= 1e-6 * scale:
                c = _critical_point(jet, 0.5 * (roots[k] + roots[k + 1]))
                if abs(jet(c)[0] - s) <= 1e-9 * max(1.0, _eval_scale(S, c)):
                    found += [(c, s), (c, s)]
                    k += 2
                    continue
            found.append((_polish_simple(jet, roots[k], s), s))
            k += 1
    found.sort()
    edges = [e for e, _ in found]
    values = [s for _, s in found]
    if len(edges) != 2 * t:
        raise BandStructureError(f"found {len(edges)} real band edges, expected {2 * t}")
    norm = max(1.0, max(_eval_scale(S, e) for e in edges))
    for e, s in zip(edges, values):
        if abs(jet(e)[0] - s) > EDGE_TOL * norm:
            raise BandStructureError(f"edge {e!r} refines only to S = {jet(e)[0]!r} (target {s:+g})")
    for i in range(t):
        if values[2 * i] == values[2 * i + 1]:
            raise BandStructureError(f"band {i + 1} edges do not sweep S across [-2, 2]")
    span = edges[-1] - edges[0]
    touching = [False] * (2 * t)
    for i in range(1, t):
        if edges[2 * i] - edges[2 * i - 1] <= TOUCH_TOL * span:
            c = _critical_point(jet, 0.5 * (edges[2 * i] + edges[2 * i - 1]))
            edges[2 * i - 1] = edges[2 * i] = c
            touching[2 * i - 1] = touching[2 * i] = True
    return BandStructure(tuple(edges), S, t, tuple(values), tuple(touching), coeffs)


def bands_for(coeffs: PeriodicCoefficients) -> BandStructure:
    return band_edges(discriminant(coeffs), coeffs.t, coeffs)


def rho0(bands: BandStructure, x: float) -> float:
    """Density of the periodic limit matrix; ``inf`` at simple band edges."""
    return float(bands.rho0_array(np.array([x], dtype=float))[0])


def _band_integrand(bands: BandStructure, i: int, weight=None):
    def f(x, dl, dr):
        left = dl <= dr
        vals = np.where(
            left,
            bands.rho0_offset(2 * i, np.where(left, dl, 1.0)),
            bands.rho0_offset(2 * i + 1, np.where(left, -1.0, -dr)),
        )
        return vals if weight is None else vals * weight(x)

    return f


def rho0_band_integral(bands: BandStructure, i: int, rtol: float = 1e-12) -> float:
    """Mass of rho0 on band ``i`` (1-based); 1/t for every band."""
    if not 1 <= i <= bands.t:
        raise IndexError(f"band index must lie in 1..{bands.t}, got {i}")
    lo, hi = bands.bands[i - 1]
    val, _ = tanh_sinh(_band_integrand(bands, i - 1), lo, hi, rtol=rtol, atol=1e-15)
    return val


def rho0_moment(bands: BandStructure, M: int, rtol: float = 1e-12) -> float:
    """Integral of x**M rho0(x) over spec(L)."""
    total = 0.0
    for i, (lo, hi) in enumerate(bands.bands):
        if hi > lo:
            val, _ = tanh_sinh(_band_integrand(bands, i, lambda x: x**M), lo, hi, rtol=rtol, atol=1e-15)
            total += val
    return total
