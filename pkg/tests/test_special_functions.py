import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import legendre as npleg
from scipy import special

from hypersphere.special_functions import (
    MAX_DEGREE,
    DegreeError,
    Quadrature1D,
    assoc_legendre_normalized,
    assoc_legendre_table,
    gauss_legendre,
    gegenbauer_C,
    jacobi_P,
    legendre_P,
    legendre_all,
    pochhammer,
)


@pytest.mark.parametrize("ell, x, expected", [(0, 0.3, 1.0), (1, 0.3, 0.3), (5, 1.0, 1.0)])
def test_legendre_examples(ell, x, expected):
    assert legendre_P(ell, x) == pytest.approx(expected, abs=1e-15)
    assert isinstance(legendre_P(ell, x), float)


def test_legendre_matches_numpy():
    x = np.linspace(-1, 1, 101)
    for ell in range(0, 41):
        ref = npleg.legval(x, [0] * ell + [1])
        assert np.max(np.abs(legendre_P(ell, x) - ref)) < 1e-12
    table = legendre_all(12, x)
    assert table.shape == (13, 101)
    assert np.allclose(table[7], legendre_P(7, x), atol=1e-15)


def test_assoc_legendre_examples():
    assert assoc_legendre_normalized(0, 0, 0.7) == pytest.approx(1 / math.sqrt(4 * math.pi), abs=1e-15)
    assert assoc_legendre_normalized(1, 0, 1.0) == pytest.approx(math.sqrt(3 / (4 * math.pi)), abs=1e-15)


def test_assoc_legendre_normalization_integral():
    # Normalized P_2^2 at 0 is c * (1 - x^2) with c fixed by the integral of
    # its square over [-1, 1] being 1 / (2 pi); oracle is a 1-D Gauss rule.
    x, w = np.polynomial.legendre.leggauss(40)
    c = 1.0 / math.sqrt(2 * math.pi * np.sum(w * (1 - x * x) ** 2))
    assert assoc_legendre_normalized(2, 2, 0.0) == pytest.approx(c, abs=1e-12)


def test_assoc_legendre_matches_scipy():
    x = np.linspace(-0.99, 0.99, 37)
    table = assoc_legendre_table(20, x)
    for ell in range(21):
        for m in range(ell + 1):
            # scipy's lpmv carries the Condon-Shortley phase.
            norm = math.sqrt((2 * ell + 1) / (4 * math.pi) * math.exp(math.lgamma(ell - m + 1) - math.lgamma(ell + m + 1)))
            ref = (-1) ** m * norm * special.lpmv(m, ell, x)
            assert np.max(np.abs(table[ell, m] - ref)) < 1e-11, (ell, m)
    assert np.all(table[3, 5] == 0)


def test_assoc_legendre_rejects_bad_order():
    with pytest.raises(ValueError):
        assoc_legendre_normalized(2, 3, 0.1)


@pytest.mark.parametrize("ell, alpha, x, expected", [(0, 0.5, 0.9, 1.0), (1, 0.5, 0.4, 0.4), (3, 0.5, 1.0, 1.0)])
def test_gegenbauer_examples(ell, alpha, x, expected):
    assert gegenbauer_C(ell, alpha, x) == pytest.approx(expected, abs=1e-15)


def test_gegenbauer_legendre_bridge():
    x = np.linspace(-1, 1, 81)
    for ell in range(31):
        assert np.max(np.abs(gegenbauer_C(ell, 0.5, x) - legendre_P(ell, x))) <= 1e-11


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
def test_gegenbauer_matches_scipy(alpha):
    x = np.linspace(-1, 1, 41)
    for ell in range(25):
        ref = special.eval_gegenbauer(ell, alpha, x)
        assert np.max(np.abs(gegenbauer_C(ell, alpha, x) - ref)) <= 1e-10 * max(1.0, np.max(np.abs(ref)))


def test_jacobi_examples():
    assert jacobi_P(0, 1.0, 0.0, 0.2) == 1.0
    assert jacobi_P(2, 1.0, 0.0, 1.0) == pytest.approx(3.0, abs=1e-14)
    assert jacobi_P(4, 1.0, 0.0, -1.0) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("alpha, beta", [(1.0, 0.0), (1.5, 0.5), (2.0, 1.0), (0.5, -0.5)])
def test_jacobi_endpoint_closed_forms(alpha, beta):
    for n in range(21):
        at_one = math.comb(n, n) * math.gamma(n + alpha + 1) / (math.gamma(alpha + 1) * math.factorial(n))
        at_minus = (-1) ** n * math.gamma(n + beta + 1) / (math.gamma(beta + 1) * math.factorial(n))
        assert jacobi_P(n, alpha, beta, 1.0) == pytest.approx(at_one, rel=1e-10)
        assert jacobi_P(n, alpha, beta, -1.0) == pytest.approx(at_minus, rel=1e-10)


def test_jacobi_matches_scipy():
    x = np.linspace(-1, 1, 33)
    for n in range(20):
        ref = special.eval_jacobi(n, 1.0, 0.5, x)
        assert np.max(np.abs(jacobi_P(n, 1.0, 0.5, x) - ref)) <= 1e-10 * max(1.0, np.max(np.abs(ref)))


@pytest.mark.parametrize("a, ell, expected", [(3.0, 0, 1.0), (2.0, 3, 24.0), (0.5, 2, 0.75)])
def test_pochhammer(a, ell, expected):
    assert pochhammer(a, ell) == expected


def test_degree_cap():
    with pytest.raises(DegreeError):
        legendre_P(MAX_DEGREE + 1, 0.0)
    with pytest.raises(DegreeError):
        legendre_P(-1, 0.0)


def test_gauss_legendre_small_rules():
    one = gauss_legendre(1)
    assert one.nodes.tolist() == [0.0] and one.weights[0] == pytest.approx(2.0, abs=1e-15)
    two = gauss_legendre(2)
    assert np.allclose(two.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
    assert np.allclose(two.weights, [1.0, 1.0], atol=1e-15)
    assert gauss_legendre(5).integrate(lambda x: x**8) == pytest.approx(2 / 9, abs=1e-13)


def test_gauss_legendre_exactness_on_monomials():
    for m in range(1, 21):
        rule = gauss_legendre(m)
        assert rule.count == m
        assert abs(math.fsum(rule.weights) - 2.0) <= 1e-13
        for p in range(2 * m):
            exact = 0.0 if p % 2 else 2.0 / (p + 1)
            assert abs(rule.integrate(lambda x: x**p) - exact) <= 1e-12


def test_gauss_legendre_matches_numpy():
    for m in (3, 10, 37, 80, 200):
        x, w = np.polynomial.legendre.leggauss(m)
        rule = gauss_legendre(m)
        assert np.max(np.abs(rule.nodes - x)) < 1e-14
        assert np.max(np.abs(rule.weights - w)) < 1e-13


def test_gauss_legendre_symmetric_and_ordered():
    rule = gauss_legendre(9)
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.array_equal(rule.nodes, -rule.nodes[::-1])
    assert rule.nodes[4] == 0.0


def test_quadrature1d_validation():
    with pytest.raises(ValueError):
        Quadrature1D(np.array([0.5, 0.1]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        Quadrature1D(np.array([0.1]), np.array([-1.0]))
    with pytest.raises(ValueError):
        gauss_legendre(0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 60), st.floats(-1, 1))
def test_three_term_identity(ell, x):
    # (ell + 1) P_{ell+1} = (2 ell + 1) x P_ell - ell P_{ell-1}
    if ell == 0:
        return
    lhs = (ell + 1) * legendre_P(ell + 1, x)
    rhs = (2 * ell + 1) * x * legendre_P(ell, x) - ell * legendre_P(ell - 1, x)
    assert abs(lhs - rhs) <= 1e-11 * (ell + 1)
