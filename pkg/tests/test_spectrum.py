import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jacobi_density import PeriodicCoefficients, ScalingSpec, TridiagonalMatrix, UnsupportedForEmpirical
from jacobi_density.bands import bands_for
from jacobi_density.coeffs import build_truncated
from jacobi_density.spectrum import (
    SpectrumResult,
    eigenvalues,
    histogram,
    ks_distance,
    scaled_spectrum,
    sturm_count,
)

from oracles import charpoly_eigenvalues

CONSTANT = ScalingSpec.constant()
LINEAR = ScalingSpec.power(1.0)


def tri(diag, off):
    return TridiagonalMatrix(np.asarray(diag, dtype=float), np.asarray(off, dtype=float))


@st.composite
def random_tridiagonal(draw, max_m=12):
    m = draw(st.integers(2, max_m))
    diag = draw(st.lists(st.floats(-3, 3), min_size=m, max_size=m))
    off = draw(st.lists(st.floats(0.05, 3).flatmap(lambda v: st.sampled_from([v, -v])), min_size=m - 1, max_size=m - 1))
    return tri(diag, off)


class TestEigenvalues:
    def test_examples(self):
        assert np.allclose(eigenvalues(tri([0, 0], [1])), [-1, 1], atol=1e-12)
        assert np.allclose(eigenvalues(tri([1, 1, 1], [1, 1])), [1 - math.sqrt(2), 1, 1 + math.sqrt(2)], atol=1e-12)
        k = np.arange(1, 11)
        assert np.allclose(eigenvalues(tri(np.zeros(10), np.ones(9))), np.sort(2 * np.cos(k * np.pi / 11)), atol=1e-12)

    def test_single_entry(self):
        assert eigenvalues(tri([4.5], [])).tolist() == pytest.approx([4.5], abs=1e-12)

    @pytest.mark.parametrize("seed", range(50))
    def test_matches_characteristic_polynomial(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, 9))
        diag = rng.uniform(-3, 3, m)
        off = rng.uniform(-3, 3, m - 1)
        got = eigenvalues(tri(diag, off))
        assert np.max(np.abs(got - charpoly_eigenvalues(diag, off))) <= 1e-9

    def test_repeated_eigenvalues(self):
        # direct sum of two copies of the same block, coupled by an off-diagonal near 0
        m = tri([1, 2, 1, 2], [0.5, 1e-300, 0.5])
        got = eigenvalues(m)
        single = np.sort(np.linalg.eigvalsh([[1, 0.5], [0.5, 2]]))
        assert np.allclose(got, np.repeat(single, 2), atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(random_tridiagonal())
    def test_sturm_completeness_and_interlacing(self, m):
        lo, hi = -1e6, 1e6
        assert sturm_count(m, np.array([hi]))[0] == m.m
        assert sturm_count(m, np.array([lo]))[0] == 0
        full = eigenvalues(m)
        sub = eigenvalues(m.leading(m.m - 1))
        tol = 1e-10
        assert np.all(full[:-1] <= sub + tol) and np.all(sub <= full[1:] + tol)

    @pytest.mark.parametrize("m", [2, 17, 64])
    def test_sign_flip_invariance(self, m):
        rng = np.random.default_rng(m)
        d, e = rng.uniform(-3, 3, m), rng.uniform(-3, 3, m - 1)
        flips = rng.choice([-1.0, 1.0], m - 1)
        assert np.allclose(eigenvalues(tri(d, e)), eigenvalues(tri(d, e * flips)), rtol=0, atol=1e-10)

    def test_free_matrix_large(self):
        m = 1000
        k = np.arange(1, m + 1)
        got = eigenvalues(tri(np.zeros(m), np.ones(m - 1)))
        assert np.max(np.abs(got - np.sort(2 * np.cos(k * np.pi / (m + 1))))) <= 1e-10

    def test_threads_bitwise_identical(self):
        m = build_truncated(PeriodicCoefficients(2, (0.3, -0.2), (1.0, 0.6)), LINEAR, 150)
        assert np.array_equal(eigenvalues(m, threads=1), eigenvalues(m, threads=4))


class TestScaledSpectrum:
    def test_small_example(self):
        s = scaled_spectrum(PeriodicCoefficients(1, (0.0,), (1.0,)), CONSTANT, 2)
        assert np.allclose(s.values, [-1, 1], atol=1e-12)
        assert (s.n, s.t) == (2, 1)

    def test_constant_stays_inside(self):
        s = scaled_spectrum(PeriodicCoefficients(1, (0.0,), (1.0,)), CONSTANT, 100)
        assert s.values.min() >= -2 - 1e-9 and s.values.max() <= 2 + 1e-9

    def test_gap_states_are_few(self):
        s = scaled_spectrum(PeriodicCoefficients(2, (0.0, 0.0), (1.0, 2.0)), CONSTANT, 200)
        assert np.count_nonzero((s.values > -0.95) & (s.values < 0.95)) <= 2

    def test_divides_by_top_scale(self):
        c = PeriodicCoefficients(1, (1.0,), (0.25,))
        s = scaled_spectrum(c, ScalingSpec.power(2.0), 5)
        raw = eigenvalues(build_truncated(c, ScalingSpec.power(2.0), 5))
        assert np.allclose(s.values, raw / 25.0, rtol=1e-15)

    def test_tabulated_rejected(self):
        table = ScalingSpec.tabulated([[0.5, 2.0], [1.0, 2.0]])
        with pytest.raises(UnsupportedForEmpirical):
            scaled_spectrum(PeriodicCoefficients(1, (0.0,), (1.0,)), table, 10)

    def test_result_length_checked(self):
        with pytest.raises(ValueError):
            SpectrumResult(np.zeros(3), 2, 1)


class TestKolmogorovSmirnov:
    def test_arcsine_constant(self):
        c = PeriodicCoefficients(1, (0.0,), (1.0,))
        ks = ks_distance(scaled_spectrum(c, CONSTANT, 2000), bands_for(c), CONSTANT)
        assert ks <= 0.01

    def test_linear_scaling_converges(self):
        c = PeriodicCoefficients(1, (0.0,), (0.5,))
        bands = bands_for(c)
        big = ks_distance(scaled_spectrum(c, LINEAR, 2000), bands, LINEAR)
        small = ks_distance(scaled_spectrum(c, LINEAR, 10), bands, LINEAR)
        assert big <= 0.05
        assert 0 <= small <= 1 and small > big

    def test_exact_samples_give_small_distance(self):
        # quantiles of the arcsine law placed at mid-ranks have KS exactly 1/(2N)
        N = 200
        u = (np.arange(N) + 0.5) / N
        z = -2 * np.cos(np.pi * u)
        c = PeriodicCoefficients(1, (0.0,), (1.0,))
        ks = ks_distance(SpectrumResult(z, N, 1), bands_for(c), CONSTANT)
        assert ks == pytest.approx(0.5 / N, abs=1e-12)


class TestHistogram:
    def test_examples(self):
        h = histogram(SpectrumResult(np.array([-1.0, -1.0, 1.0, 1.0]), 4, 1), 2, -2, 2)
        assert h[:, 1].tolist() == [0.25, 0.25]
        assert h[:, 0].tolist() == [-1.0, 1.0]
        e = histogram(SpectrumResult(np.array([-1.0, 1.0]), 2, 1), 3, 5, 8)
        assert np.all(e[:, 1] == 0)

    def test_mass_is_fraction_inside(self):
        s = SpectrumResult(np.linspace(-3, 3, 60), 60, 1)
        h = histogram(s, 7, -1, 2)
        inside = np.count_nonzero((s.values >= -1) & (s.values <= 2)) / 60
        assert np.sum(h[:, 1]) * (3 / 7) == pytest.approx(inside)

    def test_rejects_bad_arguments(self):
        s = SpectrumResult(np.zeros(1), 1, 1)
        with pytest.raises(ValueError):
            histogram(s, 0, 0, 1)
        with pytest.raises(ValueError):
            histogram(s, 3, 1, 1)

    def test_flat_plateau(self):
        c = PeriodicCoefficients(1, (3.0,), (0.5,))
        h = histogram(scaled_spectrum(c, LINEAR, 2000), 10, 0.0, 2.0)
        assert np.max(np.abs(h[:, 1] - 1 / math.sqrt(8))) <= 0.05
