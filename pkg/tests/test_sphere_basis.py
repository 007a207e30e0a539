import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from hypersphere.quadrature import build_rule
from hypersphere.sphere_basis import (
    HarmonicIndex,
    SpherePoint,
    UnsupportedDimensionError,
    eval_harmonic,
    harmonic_dimension,
    harmonic_matrix,
    iter_indices,
    kernel_E,
    kernel_G,
    space_dimension,
    surface_area,
)


def random_points(rng, count):
    v = rng.standard_normal((count, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@pytest.mark.parametrize("d, ell, expected", [(2, 0, 1), (2, 3, 7), (3, 2, 9)])
def test_harmonic_dimension(d, ell, expected):
    assert harmonic_dimension(d, ell) == expected


@pytest.mark.parametrize("d, n, expected", [(2, 0, 1), (2, 3, 16), (3, 2, 14)])
def test_space_dimension(d, n, expected):
    assert space_dimension(d, n) == expected


def test_dimension_bookkeeping():
    for d in range(2, 7):
        for n in range(41):
            assert sum(harmonic_dimension(d, ell) for ell in range(n + 1)) == space_dimension(d, n)


def test_dimension_rejects_bad_input():
    with pytest.raises(UnsupportedDimensionError):
        harmonic_dimension(1, 2)
    with pytest.raises(ValueError):
        space_dimension(2, -1)


def test_surface_area():
    assert surface_area(2) == pytest.approx(4 * math.pi, rel=1e-15)
    assert surface_area(3) == pytest.approx(2 * math.pi**2, rel=1e-15)
    assert surface_area(1) == pytest.approx(2 * math.pi, rel=1e-15)


def test_sphere_point_validation():
    p = SpherePoint.from_angles(0.3, 1.2)
    assert p.dim_d == 2
    with pytest.raises(ValueError):
        SpherePoint((1.0, 1.0, 0.0))


def test_harmonic_index_validation():
    assert HarmonicIndex(2, 5).validate(2).flat == 8
    with pytest.raises(ValueError):
        HarmonicIndex(2, 6).validate(2)
    with pytest.raises(ValueError):
        HarmonicIndex(1, 0)
    assert [i.flat for i in iter_indices(3)] == list(range(16))


def test_eval_harmonic_examples():
    pole = SpherePoint((0.0, 0.0, 1.0))
    x = SpherePoint.from_angles(1.1, -0.4)
    assert eval_harmonic((0, 1), x) == pytest.approx(1 / math.sqrt(4 * math.pi), abs=1e-15)
    assert eval_harmonic((1, 1), pole) == pytest.approx(math.sqrt(3 / (4 * math.pi)), abs=1e-15)
    total = sum(eval_harmonic((2, k), x) ** 2 for k in range(1, 6))
    assert total == pytest.approx(5 / (4 * math.pi), abs=1e-14)


def test_harmonics_match_scipy_complex_harmonics():
    rng = np.random.default_rng(1)
    pts = random_points(rng, 50)
    theta = np.arccos(pts[:, 2])
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    mat = harmonic_matrix(12, pts)
    for ell in range(13):
        ref = special.sph_harm_y(ell, 0, theta, phi).real
        assert np.max(np.abs(mat[:, ell * ell] - ref)) < 1e-12
        for m in range(1, ell + 1):
            y = special.sph_harm_y(ell, m, theta, phi)
            sign = (-1) ** m
            assert np.max(np.abs(mat[:, ell * ell + 2 * m - 1] - sign * math.sqrt(2) * y.real)) < 1e-12
            assert np.max(np.abs(mat[:, ell * ell + 2 * m] - sign * math.sqrt(2) * y.imag)) < 1e-12


def test_ordering_cos_then_sin():
    # At phi = 0 every sine harmonic vanishes.
    x = SpherePoint.from_angles(0.7, 0.0)
    for ell in range(1, 6):
        for j in range(1, ell + 1):
            assert abs(eval_harmonic((ell, 2 * j + 1), x)) < 1e-15
            assert abs(eval_harmonic((ell, 2 * j), x)) > 0


def test_unsupported_dimension():
    with pytest.raises(UnsupportedDimensionError):
        eval_harmonic((1, 1), SpherePoint((0.0, 0.0, 0.0, 1.0)))
    with pytest.raises(UnsupportedDimensionError):
        harmonic_matrix(2, np.array([[0.0, 0.0, 0.0, 1.0]]))


def test_kernel_G_examples():
    assert kernel_G(0, 2, 0.5) == pytest.approx(1 / (4 * math.pi), abs=1e-15)
    t = np.linspace(-1, 1, 9)
    assert np.allclose(kernel_G(1, 2, t), 3 / (4 * math.pi) * t, atol=1e-15)
    x = np.array([1.0, 0.0, 0.0])
    y = np.array([0.3, math.sqrt(1 - 0.09), 0.0])
    lhs = harmonic_matrix(4, x)[0, 16:25] @ harmonic_matrix(4, y)[0, 16:25]
    assert lhs == pytest.approx(kernel_G(4, 2, 0.3), abs=1e-10)


def test_kernel_E_examples():
    assert kernel_E(0, 2, 0.9) == pytest.approx(1 / (4 * math.pi), abs=1e-15)
    assert kernel_E(3, 2, 0.2) == pytest.approx(sum(kernel_G(ell, 2, 0.2) for ell in range(4)), abs=1e-11)
    assert kernel_E(5, 3, -0.4) == pytest.approx(sum(kernel_G(ell, 3, -0.4) for ell in range(6)), abs=1e-10)


def test_addition_theorem_random_pairs():
    rng = np.random.default_rng(2024)
    x, y = random_points(rng, 200), random_points(rng, 200)
    hx, hy = harmonic_matrix(25, x), harmonic_matrix(25, y)
    t = np.sum(x * y, axis=1)
    for ell in range(26):
        block = slice(ell * ell, (ell + 1) ** 2)
        lhs = np.sum(hx[:, block] * hy[:, block], axis=1)
        assert np.max(np.abs(lhs - kernel_G(ell, 2, t))) <= 1e-10


@pytest.mark.parametrize("d", [2, 3, 4])
def test_kernel_consistency(d):
    t = np.linspace(-1, 1, 41)
    for n in range(26):
        partial = sum(kernel_G(ell, d, t) for ell in range(n + 1))
        scale = np.max(np.abs(partial))
        assert np.max(np.abs(kernel_E(n, d, t) - partial)) <= 1e-9 * scale


def test_discrete_orthonormality():
    for n in (2, 6, 10):
        rule = build_rule(n)
        b = rule.basis(n)
        gram = (b * rule.weights[:, None]).T @ b
        assert np.max(np.abs(gram - np.eye(gram.shape[0]))) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.floats(0, math.pi), st.floats(-math.pi, math.pi), st.integers(0, 20))
def test_addition_theorem_on_diagonal(theta, phi, ell):
    x = SpherePoint.from_angles(theta, phi)
    row = harmonic_matrix(ell, x)[0, ell * ell:]
    assert float(row @ row) == pytest.approx((2 * ell + 1) / (4 * math.pi), abs=1e-11)
