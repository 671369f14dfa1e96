"""Scaling functions phi and their limit profile density g on (0, 1].

For phi(n) = n**gamma the profile omega(u) = u**gamma has density
g(omega) = omega**(1/gamma - 1) / gamma. A constant phi collapses the profile
onto omega = 1; that case is modelled as a unit point mass there.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import UnsupportedForEmpirical

TABLE_NORM_TOL = 1e-6


class ScalingKind(str, enum.Enum):
    CONSTANT = "constant"
    POWER = "power"
    TABULATED = "table"


@dataclass(frozen=True)
class ScalingSpec:
    kind: ScalingKind
    gamma: float | None = None
    table: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        kind = ScalingKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is ScalingKind.POWER:
            if self.gamma is None or not math.isfinite(self.gamma) or self.gamma <= 0:
                raise ValueError(f"gamma must be a finite positive number, got {self.gamma!r}")
            object.__setattr__(self, "gamma", float(self.gamma))
        elif kind is ScalingKind.TABULATED:
            pts = tuple((float(w), float(g)) for w, g in self.table)
            if len(pts) < 2:
                raise ValueError("a tabulated g needs at least two points")
            w = np.array([p[0] for p in pts])
            g = np.array([p[1] for p in pts])
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(g))):
                raise ValueError("table entries must be finite")
            if w[0] <= 0 or w[-1] > 1:
                raise ValueError("table omega values must lie in (0, 1]")
            if np.any(np.diff(w) <= 0):
                raise ValueError("table omega values must be strictly ascending")
            if np.any(g < 0):
                raise ValueError("table g values must be nonnegative")
            total = float(np.trapezoid(g, w))
            if abs(total - 1.0) > TABLE_NORM_TOL:
                raise ValueError(f"table is not normalized: trapezoidal integral of g is {total!r}")
            object.__setattr__(self, "table", pts)

    @classmethod
    def constant(cls) -> "ScalingSpec":
        return cls(ScalingKind.CONSTANT)

    @classmethod
    def power(cls, gamma: float) -> "ScalingSpec":
        return cls(ScalingKind.POWER, gamma=gamma)

    @classmethod
    def tabulated(cls, points: Sequence[Sequence[float]]) -> "ScalingSpec":
        return cls(ScalingKind.TABULATED, table=tuple(tuple(p) for p in points))

    @property
    def is_constant(self) -> bool:
        return self.kind is ScalingKind.CONSTANT

    def to_json(self) -> dict:
        if self.kind is ScalingKind.CONSTANT:
            return {"kind": "constant"}
        if self.kind is ScalingKind.POWER:
            return {"kind": "power", "gamma": self.gamma}
        return {"kind": "table", "points": [list(p) for p in self.table]}

    @classmethod
    def from_json(cls, obj: dict) -> "ScalingSpec":
        kind = obj.get("kind")
        if kind == "constant":
            return cls.constant()
        if kind == "power":
            return cls.power(obj.get("gamma"))
        if kind == "table":
            return cls.tabulated(obj.get("points", ()))
        raise ValueError(f"unknown scaling kind {kind!r}")

    # Vectorized helpers used by the quadrature code.  None of them ever
    # evaluates g at omega = 0.

    def g_array(self, omega: np.ndarray) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        if self.kind is ScalingKind.POWER:
            gam = self.gamma
            return omega ** (1.0 / gam - 1.0) / gam
        if self.kind is ScalingKind.TABULATED:
            w, g = self._table_arrays()
            return np.interp(omega, w, g, left=0.0, right=0.0)
        raise ValueError("g is not a function for constant scaling (point mass at omega=1)")

    def g_cdf(self, omega: np.ndarray | float) -> np.ndarray:
        """Integral of g from 0 to ``omega``."""
        omega = np.clip(np.asarray(omega, dtype=float), 0.0, 1.0)
        if self.kind is ScalingKind.POWER:
            return omega ** (1.0 / self.gamma)
        if self.kind is ScalingKind.TABULATED:
            w, g = self._table_arrays()
            seg = 0.5 * (g[1:] + g[:-1]) * np.diff(w)
            cum = np.concatenate(([0.0], np.cumsum(seg)))
            j = np.clip(np.searchsorted(w, omega, side="right") - 1, 0, len(w) - 2)
            x = np.clip(omega, w[0], w[-1])
            gx = np.interp(x, w, g)
            partial = 0.5 * (g[j] + gx) * (x - w[j])
            return np.where(omega < w[0], 0.0, cum[j] + partial)
        return np.where(omega >= 1.0, 1.0, 0.0)

    def breakpoints(self) -> tuple[float, ...]:
        """Interior kinks of g in (0, 1), where quadrature intervals are split."""
        if self.kind is ScalingKind.TABULATED:
            return tuple(w for w, _ in self.table if 0.0 < w < 1.0)
        return ()

    def inverse_moment(self) -> float:
        """Integral of g(omega)/omega over (0, 1]; ``inf`` when it diverges."""
        if self.kind is ScalingKind.CONSTANT:
            return 1.0
        if self.kind is ScalingKind.POWER:
            return 1.0 / (1.0 - self.gamma) if self.gamma < 1.0 else math.inf
        w, g = self._table_arrays()
        total = 0.0
        for w0, w1, g0, g1 in zip(w[:-1], w[1:], g[:-1], g[1:]):
            slope = (g1 - g0) / (w1 - w0)
            total += (g0 - slope * w0) * math.log(w1 / w0) + slope * (w1 - w0)
        return total

    def _table_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        arr = np.asarray(self.table, dtype=float)
        return arr[:, 0], arr[:, 1]


def g_of(scaling: ScalingSpec, omega: float) -> float:
    """Density of the limit profile at ``omega`` in (0, 1]."""
    if not (0.0 < omega <= 1.0):
        raise ValueError(f"omega must lie in (0, 1], got {omega!r}")
    if scaling.is_constant:
        raise ValueError("constant scaling has no density g; handle it as a point mass at omega=1")
    return float(scaling.g_array(np.array([omega]))[0])


def phi_of(scaling: ScalingSpec, k: int) -> float:
    """Block scale phi(k); power scaling uses the shifted argument (k+1)**gamma."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if scaling.kind is ScalingKind.CONSTANT:
        return 1.0
    if scaling.kind is ScalingKind.POWER:
        return float(k + 1) ** scaling.gamma
    raise UnsupportedForEmpirical("phi cannot be recovered from a tabulated g")


def phi_array(scaling: ScalingSpec, k: np.ndarray) -> np.ndarray:
    k = np.asarray(k)
    if scaling.kind is ScalingKind.CONSTANT:
        return np.ones(k.shape)
    if scaling.kind is ScalingKind.POWER:
        return (k + 1.0) ** scaling.gamma
    raise UnsupportedForEmpirical("phi cannot be recovered from a tabulated g")


def omega_moment(scaling: ScalingSpec, M: int) -> float:
    """Integral of omega**M * g(omega) over (0, 1]."""
    if M < 0:
        raise ValueError(f"M must be nonnegative, got {M}")
    if scaling.kind is ScalingKind.CONSTANT:
        return 1.0
    if scaling.kind is ScalingKind.POWER:
        return 1.0 / (M * scaling.gamma + 1.0)
    # exact integral of omega**M against the piecewise-linear g
    w, g = scaling._table_arrays()
    total = 0.0
    for w0, w1, g0, g1 in zip(w[:-1], w[1:], g[:-1], g[1:]):
        slope = (g1 - g0) / (w1 - w0)
        icpt = g0 - slope * w0
        total += icpt * (w1 ** (M + 1) - w0 ** (M + 1)) / (M + 1)
        total += slope * (w1 ** (M + 2) - w0 ** (M + 2)) / (M + 2)
    return total
