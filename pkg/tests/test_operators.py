import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypersphere.operators import (
    CoefficientVector,
    DegreeMismatchError,
    ExactnessError,
    Filter,
    FilterValidationError,
    OperatorSpec,
    RuleMismatchError,
    SampledFunction,
    analyze,
    apply,
    coefficient_transform,
    compose,
    discrete_inner,
    hard_threshold,
    hc_membership_scan,
    hc_ratios,
    poly_l2_norm,
    semi_norm,
    soft_threshold,
    synthesize,
)
from hypersphere.quadrature import build_rule
from hypersphere.sphere_basis import SpherePoint, harmonic_matrix
from hypersphere.testfns import default_corpus, random_polynomial

RULE6 = build_rule(6)
RULE10 = build_rule(10)


def harmonic(ell, k, degree=None):
    col = ell * ell + k - 1
    return lambda x: harmonic_matrix(degree or ell, x)[:, col]


# -- inner product and semi-norm ------------------------------------------


def test_discrete_inner_examples():
    assert discrete_inner(1, 1, RULE6) == pytest.approx(4 * math.pi, abs=1e-12)
    assert discrete_inner(harmonic(3, 2), harmonic(3, 2), RULE6) == pytest.approx(1.0, abs=1e-11)
    assert abs(discrete_inner(harmonic(1, 1), harmonic(2, 1), RULE6)) <= 1e-11


def test_semi_norm_examples():
    assert semi_norm(0, RULE6) == 0.0
    assert semi_norm(1, RULE6) == pytest.approx(2 * math.sqrt(math.pi), abs=1e-13)


def test_samples_bound_to_other_rule_rejected():
    f = SampledFunction.on_rule(np.ones(RULE6.size), RULE6)
    with pytest.raises(RuleMismatchError):
        discrete_inner(f, f, build_rule(5))
    with pytest.raises(RuleMismatchError):
        SampledFunction.on_rule(np.ones(3), RULE6)


def test_inner_bilinear_and_symmetric():
    rng = np.random.default_rng(3)
    for _ in range(20):
        f, g, h = rng.standard_normal((3, RULE6.size))
        a, b = rng.standard_normal(2)
        assert discrete_inner(f, g, RULE6) == discrete_inner(g, f, RULE6)
        lhs = discrete_inner(a * f + b * g, h, RULE6)
        rhs = a * discrete_inner(f, h, RULE6) + b * discrete_inner(g, h, RULE6)
        assert abs(lhs - rhs) <= 1e-13 * max(1.0, abs(lhs)) * 100


# -- analysis and synthesis ------------------------------------------------


def test_analyze_harmonic_is_unit_vector():
    c = analyze(harmonic(2, 1), 2, build_rule(2))
    assert np.max(np.abs(c.values - CoefficientVector.unit(2, (2, 1)).values)) <= 1e-13


def test_analyze_reproduces_polynomial_coefficients():
    coeffs, p = random_polynomial(5, seed=11)
    c = analyze(p, 5, build_rule(5))
    assert np.max(np.abs(c.values - coeffs.values)) <= 1e-10


def test_analyze_parity():
    c = analyze(lambda x: x[:, 2] ** 7, 3, build_rule(5))
    zonal = [ell * ell for ell in range(4)]
    for flat, v in enumerate(c.values):
        if flat in zonal and (math.isqrt(flat) % 2 == 1):
            assert abs(v) > 1e-3
        else:
            assert abs(v) <= 1e-12


def test_analyze_warns_below_exactness():
    with pytest.warns(UserWarning, match="exactness"):
        analyze(1, 4, build_rule(2))


def test_synthesize_examples():
    x = SpherePoint.from_angles(0.4, 2.0)
    assert synthesize(CoefficientVector.unit(3, (0, 1)), x) == pytest.approx(1 / math.sqrt(4 * math.pi), abs=1e-15)
    assert synthesize(CoefficientVector.zeros(3), x) == 0.0
    coeffs, p = random_polynomial(6, seed=2)
    pts = np.random.default_rng(0).standard_normal((30, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    c = analyze(p, 6, RULE6)
    assert np.max(np.abs(synthesize(c, pts) - p(pts))) <= 1e-10


def test_poly_l2_norm_examples():
    assert poly_l2_norm(CoefficientVector.unit(2, (1, 1))) == 1.0
    assert poly_l2_norm(CoefficientVector.zeros(2)) == 0.0
    c = analyze(lambda x: harmonic(2, 1)(x) + harmonic(0, 1)(x), 2, RULE6)
    assert poly_l2_norm(c) == pytest.approx(math.sqrt(2), abs=1e-11)


def test_coefficient_vector_validation_and_csv():
    with pytest.raises(ValueError):
        CoefficientVector(2, np.zeros(8))
    with pytest.raises(ValueError):
        CoefficientVector(1, np.array([0.0, np.inf, 0.0, 0.0]))
    coeffs, _ = random_polynomial(3, seed=5)
    text = coeffs.to_csv()
    assert text.splitlines()[0] == "l,k,value"
    back = CoefficientVector.from_csv(text)
    assert np.array_equal(back.values, coeffs.values)
    assert coeffs[(2, 3)] == coeffs.values[6]


# -- thresholds and filters -------------------------------------------------


@pytest.mark.parametrize("a, k, expected", [(3, 1, 2), (-3, 1, -2), (0.5, 1, 0)])
def test_soft_threshold(a, k, expected):
    assert soft_threshold(a, k) == expected


@pytest.mark.parametrize("a, k, expected", [(3, 1, 3), (1, 1, 0), (-0.2, 1, 0)])
def test_hard_threshold(a, k, expected):
    assert hard_threshold(a, k) == expected


@settings(max_examples=200, deadline=None)
@given(st.floats(-1e6, 1e6), st.floats(0, 1e3))
def test_threshold_algebra(a, k):
    s, h = soft_threshold(a, k), hard_threshold(a, k)
    assert abs(s) <= abs(a) and abs(h) <= abs(a)
    assert s * a >= 0 and h * a >= 0
    assert h in (0.0, a)
    assert soft_threshold(s, 0.0) == s
    # hard thresholding is idempotent; soft thresholding composes additively
    assert hard_threshold(h, k) == h
    assert abs(soft_threshold(s, k) - soft_threshold(a, 2 * k)) <= 1e-9 * max(1.0, abs(a))


def test_filter_examples():
    h1, h2 = Filter.h1(), Filter.h2()
    assert h1(0.25) == 1.0
    assert h1(0.75) == pytest.approx(0.5, abs=1e-15)
    assert h2(2.0) == 0.0
    assert h2(0.75) == 1.0


def test_custom_filter_validation():
    ok = Filter.custom(lambda x: np.clip(2.0 - 2.0 * np.asarray(x), 0.0, 1.0), 0.5)
    assert ok(0.75) == pytest.approx(0.5)
    with pytest.raises(FilterValidationError):
        Filter.custom(lambda x: np.exp(-np.asarray(x)), 0.5)
    with pytest.raises(FilterValidationError):
        Filter.custom(lambda x: np.ones_like(np.asarray(x)), 0.5)


# -- operator specs -----------------------------------------------------------


def test_spec_validation():
    with pytest.raises(ValueError):
        OperatorSpec.lasso(3, 0.0)
    with pytest.raises(ValueError):
        OperatorSpec.generalized(2, [0.9, 0.5, 0.1])
    with pytest.raises(ValueError):
        OperatorSpec.partial_sum(4, (3, 5))
    with pytest.raises(ValueError):
        OperatorSpec("spline", 3)


def test_transform_examples():
    c = CoefficientVector(1, np.array([0.6, 0.4, -0.7, 0.1]))
    assert coefficient_transform(OperatorSpec.hard(1, 0.5), c).values.tolist() == [0.6, 0.0, -0.7, 0.0]
    big = CoefficientVector(5, np.arange(36, dtype=float))
    assert np.array_equal(coefficient_transform(OperatorSpec.hyper(3), big).values, np.arange(16.0))
    filt = coefficient_transform(OperatorSpec.filtered(4, Filter.h1()), CoefficientVector(4, np.ones(25)))
    assert np.allclose(filt.values[9:16], 0.5, atol=1e-15)
    assert np.all(filt.values[:9] == 1.0) and np.all(filt.values[16:] == 0.0)
    with pytest.raises(DegreeMismatchError):
        coefficient_transform(OperatorSpec.hyper(6), big)


def test_lasso_penalties():
    spec = OperatorSpec.lasso(2, 0.5, mu={(1, 2): 4.0})
    c = CoefficientVector(2, np.full(9, 1.0))
    out = coefficient_transform(spec, c).values
    assert out[2] == 0.0 and out[0] == 0.5


def test_apply_examples():
    f = default_corpus(RULE6)[9]
    hyper = apply(OperatorSpec.hyper(6), f, RULE6)
    lasso = apply(OperatorSpec.lasso(6, 0.1), f, RULE6)
    assert np.array_equal(lasso.values, soft_threshold(hyper.values, 0.1))
    h = Filter.h1()
    gen = apply(OperatorSpec.generalized(6, h(np.arange(7) / 6)), f, RULE6)
    filt = apply(OperatorSpec.filtered(6, h), f, RULE6)
    assert np.max(np.abs(gen.values - filt.values)) <= 1e-12


def test_apply_refuses_low_exactness():
    with pytest.raises(ExactnessError):
        apply(OperatorSpec.hyper(6), 1, build_rule(4))
    with pytest.warns(UserWarning):
        apply(OperatorSpec.hyper(6), 1, build_rule(4), strict=False)


def test_compose_examples():
    f = default_corpus(RULE10)[10]
    once = apply(OperatorSpec.hyper(6), f, RULE10)
    twice = compose(OperatorSpec.hyper(6), OperatorSpec.hyper(6), f, RULE10)
    assert np.max(np.abs(once.values - twice.values)) <= 1e-12
    for m, n in ((7, 4), (3, 6)):
        out = compose(OperatorSpec.hyper(m), OperatorSpec.hard(n, 0.05), f, RULE10)
        ref = apply(OperatorSpec.hard(min(m, n), 0.05), f, RULE10).resized(m)
        assert np.max(np.abs(out.values - ref.values)) <= 1e-10
    a = [1.0, 0.7, -0.3, 0.2, 0.5]
    gen = OperatorSpec.generalized(4, a)
    sq = compose(gen, gen, f, RULE10)
    base = apply(OperatorSpec.hyper(4), f, RULE10).values
    mult = np.repeat(np.array(a) ** 2, [2 * ell + 1 for ell in range(5)])
    assert np.max(np.abs(sq.values - mult * base)) <= 1e-12


def test_compose_needs_largest_degree():
    with pytest.raises(ExactnessError):
        compose(OperatorSpec.hyper(2), OperatorSpec.hyper(8), 1, RULE6)


def test_spec_json_round_trip():
    specs = [
        OperatorSpec.hyper(4),
        OperatorSpec.lasso(4, 0.2, mu={(1, 2): 3.0}),
        OperatorSpec.hard(5, 0.1),
        OperatorSpec.filtered(6, Filter.h2()),
        OperatorSpec.generalized(2, [1.0, 0.5, 0.25]),
        OperatorSpec.partial_sum(6, (2, 4)),
    ]
    for spec in specs:
        data = json.loads(spec.to_json())
        assert data["kind"] == spec.kind
        assert OperatorSpec.from_json(spec.to_json()) == spec
    assert json.loads(specs[1].to_json())["mu"] == {"1,2": 3.0}


# -- invariants ---------------------------------------------------------------


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 20), st.integers(0, 2**31 - 1))
def test_polynomial_reproduction(n, seed):
    rule = build_rule(n)
    coeffs, p = random_polynomial(n, seed)
    out = apply(OperatorSpec.hyper(n), p, rule)
    assert np.max(np.abs(out.values - coeffs.values)) <= 1e-10


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 20), st.integers(0, 2**31 - 1))
def test_filtered_reproduction(n, seed):
    rule = build_rule(n)
    coeffs, p = random_polynomial(n // 2, seed)
    out = apply(OperatorSpec.filtered(n, Filter.h1()), p, rule)
    assert np.max(np.abs(out.values - coeffs.resized(n).values)) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10), st.lists(st.floats(-5, 5), min_size=10, max_size=10))
def test_generalized_constant_reproduction(n, tail):
    spec = OperatorSpec.generalized(n, [1.0] + tail[:n])
    out = apply(spec, 1, build_rule(n))
    expected = np.zeros((n + 1) ** 2)
    expected[0] = 2 * math.sqrt(math.pi)
    assert np.max(np.abs(out.values - expected)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-3, 2.0), st.integers(0, 1000))
def test_thresholded_coefficients_dominated(lam, seed):
    vals = np.random.default_rng(seed).standard_normal(RULE6.size)
    hyper = apply(OperatorSpec.hyper(6), vals, RULE6).values
    for spec in (OperatorSpec.hard(6, lam), OperatorSpec.lasso(6, lam)):
        assert np.all(np.abs(apply(spec, vals, RULE6).values) <= np.abs(hyper))


# -- HC scan -----------------------------------------------------------------


def test_hc_scan_constant():
    report = hc_membership_scan(OperatorSpec.hyper(4), [lambda x: np.ones(len(x))], RULE6)
    assert report.residual_max == pytest.approx(2 * math.sqrt(math.pi), abs=1e-12)
    assert report.passed


def test_hc_scan_skips_zero_function():
    report = hc_membership_scan(OperatorSpec.hyper(4), [0.0, 1.0], RULE6)
    assert report.witness["skipped_zero_members"] == [0]


def test_hc_thresholding_below_hyper():
    corpus = default_corpus(RULE10)
    base = hc_ratios(OperatorSpec.hyper(10), corpus, RULE10)
    hard = hc_ratios(OperatorSpec.hard(10, 0.2), corpus, RULE10)
    lasso = hc_ratios(OperatorSpec.lasso(10, 0.2), corpus, RULE10)
    for b, h, s in zip(base, hard, lasso):
        assert h <= b + 1e-12
        assert s <= b + 1e-12
    # const1 keeps its coefficient 2 sqrt(pi) > 0.2, so shrinkage is strict there
    assert lasso[8] < base[8]
