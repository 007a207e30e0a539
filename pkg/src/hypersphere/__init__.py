"""Hyperinterpolation-class operators on the sphere and checks of their algebra."""

from .algebra import (
    Composed,
    LinearCombination,
    ZonalProjection,
    adjoint_residual,
    best_approx_check,
    commutation_residual,
    difference_projection_check,
    generalized_kernel_bound,
    homomorphism_check,
    ideal_composition_check,
    idempotency_residual,
    minimality_witness,
    nonnegativity_check,
    norm_bound_check,
    product_projection_check,
    pythagorean_residual,
    semigroup_membership,
    sum_projection_check,
    vanishing_witness,
    zero_operator_check,
)
from .operators import (
    CoefficientVector,
    ExactnessError,
    Filter,
    OperatorSpec,
    SampledFunction,
    analyze,
    apply,
    coefficient_transform,
    compose,
    discrete_inner,
    filter_eval,
    hard_threshold,
    hc_membership_scan,
    poly_l2_norm,
    semi_norm,
    soft_threshold,
    synthesize,
)
from .quadrature import QuadratureRule, build_rule, integrate, verify_exactness
from .reports import CheckReport
from .special_functions import gauss_legendre, gegenbauer_C, jacobi_P, legendre_P
from .sphere_basis import (
    HarmonicIndex,
    SpherePoint,
    eval_harmonic,
    harmonic_dimension,
    kernel_E,
    kernel_G,
    space_dimension,
)
from .testfns import TestFunction, add_noise, default_corpus, named_function, random_polynomial

__version__ = "0.1.0"
