import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from lacunarylab.linalg import ConvergenceError, jacobi_eigenvalues, round_robin
from lacunarylab.spectra import (MomentReport, catalan, compare_moments, semicircle_cdf,
                                 semicircle_density, semicircle_moment)


@pytest.mark.parametrize("n", [2, 3, 5, 8, 13])
def test_round_robin_covers_every_pair_once(n):
    seen = []
    for p, q in round_robin(n):
        assert len(set(p) | set(q)) == 2 * len(p)  # disjoint within a round
        seen.extend(zip(p.tolist(), q.tolist()))
    assert sorted(seen) == [(i, j) for i in range(n) for j in range(i + 1, n)]


def test_jacobi_small_cases():
    np.testing.assert_array_equal(jacobi_eigenvalues(np.diag([3.0, 1.0, 2.0])), [1, 2, 3])
    np.testing.assert_array_equal(jacobi_eigenvalues([[5.0]]), [5.0])
    np.testing.assert_array_equal(jacobi_eigenvalues(np.zeros((3, 3))), [0, 0, 0])
    np.testing.assert_allclose(jacobi_eigenvalues([[2.0, 1.0], [1.0, 2.0]]), [1, 3], atol=1e-15)
    with pytest.raises(ValueError):
        jacobi_eigenvalues(np.ones((2, 3)))
    with pytest.raises(ValueError):
        jacobi_eigenvalues([[np.nan]])


def test_jacobi_reports_non_convergence():
    a = np.random.default_rng(0).normal(size=(20, 20))
    with pytest.raises(ConvergenceError):
        jacobi_eigenvalues(a + a.T, max_sweeps=1)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 64), st.integers(0, 2 ** 32 - 1))
def test_jacobi_against_lapack(n, seed):
    a = np.random.default_rng(seed).normal(size=(n, n))
    a = a + a.T
    lam = jacobi_eigenvalues(a)
    scale = np.linalg.norm(a)
    np.testing.assert_allclose(lam, np.linalg.eigvalsh(a), atol=1e-11 * scale)
    assert abs(lam.sum() - np.trace(a)) <= 1e-9 * n
    assert abs((lam ** 2).sum() - scale ** 2) <= 1e-9 * n * n


def test_jacobi_tiny_off_diagonal():
    # theta overflows for these entries; the rotation must fall back gracefully
    a = np.array([[1.0, 1e-300], [1e-300, 2.0]])
    np.testing.assert_allclose(jacobi_eigenvalues(a), [1.0, 2.0])


def test_catalan_and_moments():
    assert [catalan(m) for m in range(7)] == [1, 1, 2, 5, 14, 42, 132]
    assert semicircle_moment(4) == 2 and semicircle_moment(6) == 5 and semicircle_moment(5) == 0
    with pytest.raises(OverflowError):
        catalan(31)


def test_semicircle_cdf():
    assert semicircle_density(0) == pytest.approx(1 / math.pi)
    assert semicircle_cdf(0) == 0.5 and semicircle_cdf(2) == 1 and semicircle_cdf(-3) == 0
    assert semicircle_cdf(1) == pytest.approx(0.8045, abs=5e-4)
    for t in (-1.7, -0.3, 0.9, 1.99):
        quad, _ = integrate.quad(semicircle_density, -2, t)
        assert semicircle_cdf(t) == pytest.approx(quad, abs=1e-10)
    # finite-difference derivative of the CDF recovers the density
    for t in (-1.5, 0.2, 1.1):
        h = 1e-6
        assert (semicircle_cdf(t + h) - semicircle_cdf(t - h)) / (2 * h) == pytest.approx(
            semicircle_density(t), rel=1e-6)


def test_semicircle_moments_by_quadrature():
    for K in range(1, 9):
        val, _ = integrate.quad(lambda t: t ** K * semicircle_density(t), -2, 2)
        assert val == pytest.approx(semicircle_moment(K), abs=1e-9)


def test_compare_moments():
    rep = compare_moments({4: (1.98, 0.05)}, k_sigma=1)
    assert rep.passed
    assert not compare_moments({4: (2.6, 0.05)}).passed
    assert compare_moments({3: (0.01, 0.02)}).passed
    assert compare_moments({2: (1.02, 0.001)}, abs_floor={2: 0.03}).passed


def test_moment_report_csv_roundtrip():
    rep = compare_moments({2: (1.0000000000000002, 0.1 / 3), 3: (-1e-17, 0.2)}, metadata={"N": 4})
    text = rep.to_csv()
    assert text.splitlines()[0] == "K,estimate,std_error,reference,deviation,pass"
    assert "\r" not in text
    assert MomentReport.from_csv(text, rep.metadata).rows == rep.rows
