import math

import numpy as np
import pytest

from jacobi_density.errors import NonConvergedQuadrature
from jacobi_density.quadrature import tanh_sinh


@pytest.mark.parametrize(
    "f, a, b, exact",
    [
        (lambda x, dl, dr: 1 / np.sqrt(dl * dr), 0.0, 1.0, math.pi),
        (lambda x, dl, dr: np.log(dl), 0.0, 1.0, -1.0),
        (lambda x, dl, dr: dl**-0.75 / 4, 0.0, 1.0, 1.0),
        (lambda x, dl, dr: np.exp(x), -1.0, 2.0, math.e**2 - math.e**-1),
        (lambda x, dl, dr: 1 / np.sqrt(dl * dr), 2.0, 2.0 + 1e-14, math.pi),
    ],
)
def test_endpoint_singularities(f, a, b, exact):
    val, err = tanh_sinh(f, a, b, rtol=1e-12)
    assert val == pytest.approx(exact, rel=1e-11)
    assert err <= 1e-11 * abs(exact)


def test_reversed_limits_flip_sign():
    f = lambda x, dl, dr: x**2
    assert tanh_sinh(f, 1.0, 0.0)[0] == pytest.approx(-1 / 3, rel=1e-12)
    assert tanh_sinh(f, 3.0, 3.0) == (0.0, 0.0)


def test_non_integrable_reports_failure():
    with pytest.raises(NonConvergedQuadrature):
        tanh_sinh(lambda x, dl, dr: 1 / dl, 0.0, 1.0, rtol=1e-12)


def test_min_dist_drops_extreme_nodes():
    seen = []

    def f(x, dl, dr):
        seen.append(np.minimum(dl, dr).min())
        return np.ones_like(x)

    tanh_sinh(f, 0.0, 1.0, min_dist=1e-30)
    assert min(seen) >= 1e-30
