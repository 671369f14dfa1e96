"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` to see the lines as they
happen; they are also collected in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from jacobi_density import PeriodicCoefficients, ScalingSpec, TridiagonalMatrix
from jacobi_density.bands import band_edges, bands_for
from jacobi_density.density import integrate_rho, rho, rho_at_zero, rho_closed_form_linear
from jacobi_density.moments import density_moment, empirical_moment, theorem_moment
from jacobi_density.spectrum import eigenvalues, histogram, ks_distance, scaled_spectrum
from numpy.polynomial import Polynomial

from oracles import charpoly_eigenvalues

THREADS = 4


def t1(a0, b0):
    return PeriodicCoefficients(1, (float(a0),), (float(b0),))


GAPPED = PeriodicCoefficients(2, (0.0, 0.0), (1.0, 2.0))


def test_closed_form_equivalence(acceptance_report):
    start = time.perf_counter()
    worst = 0.0
    for a, b in [(0.0, 2.0), (1.0, 2.0), (3.0, 1.0)]:
        bands = bands_for(t1(a, b / 2))
        lo, hi = min(a - b, 0.0), a + b
        bad = (0.0, a - b, a + b)
        zs = [z for z in np.linspace(lo, hi, 100) if min(abs(z - p) for p in bad) > 1e-3]
        for z in zs:
            worst = max(worst, abs(rho(float(z), bands, ScalingSpec.power(1.0)) - rho_closed_form_linear(a, b, float(z))))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed <= 10
    acceptance_report("1 closed-form equivalence", ok, f"max |diff| = {worst:.2e} (<= 1e-6), {elapsed:.1f}s (<= 10s)")
    assert ok


def test_normalization(acceptance_report):
    start = time.perf_counter()
    cases = [
        ("(0,1) g=0.5", t1(0, 1), 0.5),
        ("(0,1) g=1", t1(0, 1), 1.0),
        ("(0,1) g=2", t1(0, 1), 2.0),
        ("(3,0.5) g=1", t1(3, 0.5), 1.0),
        ("t=2 g=1", GAPPED, 1.0),
    ]
    worst = 0.0
    for _, coeffs, gamma in cases:
        worst = max(worst, abs(integrate_rho(bands_for(coeffs), ScalingSpec.power(gamma)) - 1.0))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-5 and elapsed <= 30
    acceptance_report("2 normalization", ok, f"max |mass - 1| = {worst:.2e} (<= 1e-5), {elapsed:.1f}s (<= 30s)")
    assert ok


def test_moment_identity(acceptance_report):
    start = time.perf_counter()
    worst = 0.0
    for coeffs in (t1(0, 1), t1(2, 1), GAPPED):
        bands = bands_for(coeffs)
        for gamma in (0.5, 1.0, 2.0):
            s = ScalingSpec.power(gamma)
            for M in range(9):
                worst = max(worst, abs(density_moment(bands, s, M) - theorem_moment(coeffs, s, M)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-4 and elapsed <= 60
    acceptance_report("3 moment identity", ok, f"max |m_M - K_M w_M| = {worst:.2e} (<= 1e-4), {elapsed:.1f}s (<= 60s)")
    assert ok


def test_empirical_convergence(acceptance_report):
    start = time.perf_counter()
    s = ScalingSpec.power(1.0)
    worst_ratio = 0.0
    worst_ks = 0.0
    for a0, b0 in [(0.0, 1.0), (3.0, 0.5)]:
        coeffs = t1(a0, b0)
        spec = scaled_spectrum(coeffs, s, 4000, threads=THREADS)
        for M in range(7):
            bound = 0.02 * (abs(a0) + 2 * b0) ** M
            worst_ratio = max(worst_ratio, abs(empirical_moment(spec, M) - theorem_moment(coeffs, s, M)) / bound)
        small = scaled_spectrum(coeffs, s, 2000, threads=THREADS)
        worst_ks = max(worst_ks, ks_distance(small, bands_for(coeffs), s))
    elapsed = time.perf_counter() - start
    ok = worst_ratio <= 1.0 and worst_ks <= 0.05 and elapsed <= 120
    acceptance_report(
        "4 empirical convergence",
        ok,
        f"max moment error / bound = {worst_ratio:.3f} (<= 1), KS = {worst_ks:.2e} (<= 0.05), {elapsed:.1f}s (<= 120s)",
    )
    assert ok


def test_band_structure_oracle(acceptance_report):
    start = time.perf_counter()
    gapped = bands_for(GAPPED).edges
    err_t2 = float(np.max(np.abs(np.array(gapped) - [-3, -1, 1, 3])))
    rel_t1 = 0.0
    for a0, b0 in [(0.0, 1.0), (2.0, 1.0), (3.0, 0.5), (-1.25, 0.3), (10.0, -2.0)]:
        e = bands_for(t1(a0, b0)).edges
        want = (a0 - 2 * abs(b0), a0 + 2 * abs(b0))
        rel_t1 = max(rel_t1, *(abs(x - w) / max(abs(w), 1e-300) if w else abs(x) for x, w in zip(e, want)))
    touch = band_edges(Polynomial([-2.0, 0.0, 1.0]), 2)
    touch_ok = np.allclose(touch.edges, [-2, 0, 0, 2], atol=1e-12) and touch.touching[1]
    elapsed = time.perf_counter() - start
    ok = err_t2 <= 1e-10 and rel_t1 <= 1e-12 and touch_ok and elapsed <= 1
    acceptance_report(
        "5 band-structure oracle",
        ok,
        f"t=2 edge error {err_t2:.1e} (<= 1e-10), t=1 rel error {rel_t1:.1e} (<= 1e-12), "
        f"touching {'ok' if touch_ok else 'FAILED'}, {elapsed:.2f}s (<= 1s)",
    )
    assert ok


def test_eigensolver_oracle(acceptance_report):
    start = time.perf_counter()
    rng = np.random.default_rng(20240601)
    worst_small = 0.0
    for _ in range(50):
        m = int(rng.integers(1, 9))
        d, e = rng.uniform(-3, 3, m), rng.uniform(-3, 3, m - 1)
        got = eigenvalues(TridiagonalMatrix(d, e))
        worst_small = max(worst_small, float(np.max(np.abs(got - charpoly_eigenvalues(d, e)))))
    m = 1000
    k = np.arange(1, m + 1)
    free = eigenvalues(TridiagonalMatrix(np.zeros(m), np.ones(m - 1)))
    worst_free = float(np.max(np.abs(free - np.sort(2 * np.cos(k * np.pi / (m + 1))))))
    elapsed = time.perf_counter() - start
    ok = worst_small <= 1e-9 and worst_free <= 1e-10 and elapsed <= 5
    acceptance_report(
        "6 eigensolver oracle",
        ok,
        f"random m<=8 error {worst_small:.1e} (<= 1e-9), free m=1000 error {worst_free:.1e} (<= 1e-10), "
        f"{elapsed:.2f}s (<= 5s)",
    )
    assert ok


def test_density_shapes(acceptance_report):
    # plateau: a = 3, b = 1 in the period-one variables, so a0 = 3, b0 = 0.5 and r = sqrt(8)
    spec = scaled_spectrum(t1(3, 0.5), ScalingSpec.power(1.0), 2000, threads=THREADS)
    h = histogram(spec, 10, 0.0, 2.0)
    plateau_dev = float(np.max(np.abs(h[:, 1] - 1 / math.sqrt(8))))
    # divergence at 0 for a < b and gamma >= 1
    diverges = all(math.isinf(rho_at_zero(bands_for(t1(a0, b0)), ScalingSpec.power(g)))
                   for a0, b0 in [(0.0, 1.0), (1.0, 1.0)] for g in (1.0, 2.0))
    ok = plateau_dev <= 0.05 and diverges
    acceptance_report(
        "7 density shapes",
        ok,
        f"plateau bin deviation {plateau_dev:.2e} (<= 0.05), rho(0) = inf for a<b, gamma>=1: {diverges}",
    )
    assert ok
