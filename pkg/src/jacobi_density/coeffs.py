"""Periodic limit coefficients and the tridiagonal matrices built from them."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .scaling import ScalingSpec, phi_array


@dataclass(frozen=True)
class PeriodicCoefficients:
    """Limits a_i (diagonal) and b_i (off-diagonal) of J/phi over one period t."""

    t: int
    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self):
        if int(self.t) != self.t or self.t < 1:
            raise ValueError(f"period t must be a positive integer, got {self.t!r}")
        a = tuple(float(v) for v in self.a)
        b = tuple(float(v) for v in self.b)
        if len(a) != self.t or len(b) != self.t:
            raise ValueError(f"a and b must each have t={self.t} entries")
        for name, arr in (("a", a), ("b", b)):
            for i, v in enumerate(arr):
                if not math.isfinite(v):
                    raise ValueError(f"{name}[{i}] is not finite")
        for i, v in enumerate(b):
            if v == 0.0:
                raise ValueError(f"b[{i}] must be nonzero")
        object.__setattr__(self, "t", int(self.t))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_lists(cls, a: Sequence[float], b: Sequence[float]) -> "PeriodicCoefficients":
        return cls(len(a), tuple(a), tuple(b))


@dataclass(frozen=True, eq=False)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix stored as its diagonal and one off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float)
        offdiag = np.asarray(self.offdiag, dtype=float)
        if diag.ndim != 1 or offdiag.ndim != 1:
            raise ValueError("diag and offdiag must be one-dimensional")
        if len(diag) == 0 or len(offdiag) != len(diag) - 1:
            raise ValueError("offdiag must have exactly len(diag) - 1 entries")
        diag.setflags(write=False)
        offdiag.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def m(self) -> int:
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def inf_norm(self) -> float:
        row = np.abs(self.diag).copy()
        row[:-1] += np.abs(self.offdiag)
        row[1:] += np.abs(self.offdiag)
        return float(row.max())

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def leading(self, k: int) -> "TridiagonalMatrix":
        """Leading principal k x k submatrix."""
        return TridiagonalMatrix(self.diag[:k], self.offdiag[: k - 1])


def build_truncated(coeffs: PeriodicCoefficients, scaling: ScalingSpec, n: int) -> TridiagonalMatrix:
    """The nt x nt truncation J(n) with J[kt+i, kt+i] = a_i phi(k), J[kt+i, kt+i+1] = b_i phi(k).

    The block-boundary entry J[kt+t-1, kt+t] takes the scale of the left block.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    t = coeffs.t
    if n > sys.maxsize // t:
        raise OverflowError(f"dimension n*t = {n}*{t} exceeds the index range")
    m = n * t
    idx = np.arange(m)
    scale = phi_array(scaling, idx // t)
    diag = np.asarray(coeffs.a)[idx % t] * scale
    offdiag = (np.asarray(coeffs.b)[idx % t] * scale)[:-1]
    return TridiagonalMatrix(diag, offdiag)


def build_periodic_window(coeffs: PeriodicCoefficients, halfwidth: int) -> TridiagonalMatrix:
    """Finite window of the periodic matrix L, of dimension 2*halfwidth + 1 + t."""
    if halfwidth < 1:
        raise ValueError(f"halfwidth must be at least 1, got {halfwidth}")
    t = coeffs.t
    idx = np.arange(2 * halfwidth + 1 + t)
    diag = np.asarray(coeffs.a)[idx % t]
    offdiag = np.asarray(coeffs.b)[idx[:-1] % t]
    return TridiagonalMatrix(diag, offdiag)
