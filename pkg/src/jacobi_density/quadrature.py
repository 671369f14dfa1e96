"""Tanh-sinh (double-exponential) quadrature for integrands with endpoint singularities.

The integrand receives the abscissa together with its exact distances to both
endpoints, ``f(x, dl, dr)``.  Near a singular endpoint ``x`` itself rounds to
the endpoint long before ``dl`` or ``dr`` lose precision, so integrands that
blow up like ``dl**-0.5`` should be written in terms of the distances.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import NonConvergedQuadrature

# |t| <= T_MAX keeps exp(-2u) (u = pi/2 sinh t) above the double underflow threshold.
T_MAX = 6.0
MAX_LEVEL = 10  # 2*T_MAX*2**10 + 1 = 12289 nodes, under the 2**14 cap
MIN_LEVEL = 3

Integrand = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@lru_cache(maxsize=None)
def _level_nodes(level: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes added at ``level`` on the unit interval: (dl, dr, weight) before the step factor.

    Level 0 holds t = k for all integers |k| <= T_MAX; level j adds the odd
    multiples of 2**-j.
    """
    h = 2.0**-level
    kmax = int(math.floor(T_MAX / h))
    k = np.arange(-kmax, kmax + 1)
    if level > 0:
        k = k[k % 2 != 0]
    t = k * h
    u = 0.5 * math.pi * np.sinh(t)
    e = np.exp(-2.0 * np.abs(u))
    near = e / (1.0 + e)  # distance to the nearer end
    far = 1.0 / (1.0 + e)
    dl = np.where(u < 0, near, far)
    dr = np.where(u < 0, far, near)
    # d x / d t on [0, 1]: (pi/4) cosh t / cosh(u)**2 = pi cosh t * e / (1+e)**2
    w = math.pi * np.cosh(t) * e / (1.0 + e) ** 2
    keep = (dl > 0) & (dr > 0) & (w > 0)
    out = (dl[keep], dr[keep], w[keep])
    for arr in out:
        arr.setflags(write=False)
    return out


def tanh_sinh(
    f: Integrand,
    a: float,
    b: float,
    *,
    rtol: float = 1e-10,
    atol: float = 0.0,
    max_level: int = MAX_LEVEL,
    raise_on_fail: bool = True,
    min_dist: float = 0.0,
) -> tuple[float, float]:
    """Integrate ``f`` over the finite interval [a, b].

    Returns ``(estimate, error_estimate)``.  The error estimate is the change
    between the last two refinement levels.  Raises
    :class:`NonConvergedQuadrature` when ``max_level`` is exhausted without
    meeting ``max(atol, rtol*|estimate|)``, unless ``raise_on_fail`` is off.

    ``min_dist`` drops nodes closer than ``min_dist * (b - a)`` to either end,
    for integrands that cannot be evaluated arbitrarily close to an endpoint.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("tanh_sinh needs finite limits")
    if a == b:
        return 0.0, 0.0
    if a > b:
        val, err = tanh_sinh(
            f, b, a, rtol=rtol, atol=atol, max_level=max_level, raise_on_fail=raise_on_fail, min_dist=min_dist
        )
        return -val, err
    length = b - a
    raw_sum = 0.0
    prev = math.nan
    err = math.inf
    for level in range(max_level + 1):
        dl0, dr0, w0 = _level_nodes(level)
        if min_dist > 0:
            keep = np.minimum(dl0, dr0) >= min_dist
            dl0, dr0, w0 = dl0[keep], dr0[keep], w0[keep]
        dl = dl0 * length
        dr = dr0 * length
        x = np.where(dl <= dr, a + dl, b - dr)
        vals = np.asarray(f(x, dl, dr), dtype=float)
        if not np.all(np.isfinite(vals)):
            bad = x[~np.isfinite(vals)][0]
            raise NonConvergedQuadrature(f"integrand is not finite at x={bad!r}", estimate=math.nan)
        raw_sum += float(np.dot(w0, vals))
        est = raw_sum * length * 2.0**-level
        if level > 0:
            err = abs(est - prev)
            if level >= MIN_LEVEL and err <= max(atol, rtol * abs(est)):
                return est, err
        prev = est
    if raise_on_fail:
        raise NonConvergedQuadrature(
            f"tanh-sinh missed tolerance on [{a!r}, {b!r}]: estimate {prev!r}, error {err!r}",
            estimate=prev,
            error=err,
        )
    return prev, err
