"""Numerical checks of the algebraic laws of hyperinterpolation-class operators.

Each check returns a :class:`CheckReport`. Identities that are exact in exact
arithmetic are measured relative to the size of the input (``||f||_N`` or
``<f, f>_N``) and must stay below ``REL_TOL``; coefficientwise composition
tables use the absolute ``COEF_TOL``. Laws that are expected to fail must show
a residual above ``VIOLATION_TOL`` (``PYTH_VIOLATION_TOL`` for the
Pythagorean identity) on at least one probe.

Probes are the corpus plus seeded random draws plus crafted witnesses built
from single harmonics. Every random draw comes from a generator seeded with
``(seed, crc32(law_id))`` so cells are independent of execution order.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .operators import (
    OperatorSpec,
    SampledFunction,
    analyze_values,
    compose_values,
    inner_rows,
    node_values,
    semi_norm,
    sup_grid,
    synthesize_values,
    value_matrix,
    hc_ratios,
)
from .quadrature import QuadratureRule
from .reports import CheckReport, tol
from .special_functions import gauss_legendre, legendre_P
from .sphere_basis import harmonic_matrix, index_degrees, kernel_G

REL_TOL = 1e-9
COEF_TOL = 1e-10
VIOLATION_TOL = 1e-3
PYTH_VIOLATION_TOL = 1e-4
GUARD = 1e-6
VANISH_TOL = 1e-12
VANISH_SUP_MIN = 0.1

RANDOM_DRAWS = 200
FINGERPRINT_SIZE = 20


class LawNotApplicableError(ValueError):
    """The law's hypotheses exclude this operator."""


# ---------------------------------------------------------------------------
# Operator combinators
# ---------------------------------------------------------------------------


def _pad(coeffs: np.ndarray, degree: int) -> np.ndarray:
    size = (degree + 1) ** 2
    if coeffs.shape[1] >= size:
        return coeffs[:, :size]
    out = np.zeros((coeffs.shape[0], size))
    out[:, : coeffs.shape[1]] = coeffs
    return out


@dataclass(frozen=True)
class Composed:
    """ops[0] o ops[1] o ... (the last operator acts first)."""

    ops: tuple

    @property
    def degree(self) -> int:
        return max(op.degree for op in self.ops)

    @property
    def label(self) -> str:
        return " o ".join(op.label for op in self.ops)

    def apply_values(self, values, rule, *, strict=True):
        return _pad(compose_values(list(self.ops), values, rule, strict=strict), self.degree)


@dataclass(frozen=True)
class LinearCombination:
    """sum_i c_i T_i, realized coefficientwise on the largest degree."""

    terms: tuple

    @property
    def degree(self) -> int:
        return max(op.degree for _, op in self.terms)

    @property
    def label(self) -> str:
        return " + ".join(f"{c:g}*{op.label}" for c, op in self.terms)

    def apply_values(self, values, rule, *, strict=True):
        out = np.zeros((np.atleast_2d(values).shape[0], (self.degree + 1) ** 2))
        for c, op in self.terms:
            out += c * _pad(op.apply_values(values, rule, strict=strict), self.degree)
        return out


@dataclass(frozen=True)
class ZonalProjection:
    """Rank-one projection f -> <f, psi>_N psi onto the normalized zonal kernel.

    psi(x) = G_ell(x . u) / sqrt(G_ell(1)) has unit discrete norm on any rule
    exact to degree 2 ell. Two such projections with different axes do not
    commute, which makes them a non-diagonal test pair.
    """

    axis: tuple
    ell: int

    @property
    def degree(self) -> int:
        return self.ell

    @property
    def label(self) -> str:
        return f"zonal_projection(l={self.ell},u=({', '.join(f'{c:.3f}' for c in self.axis)}))"

    def psi_coefficients(self) -> np.ndarray:
        u = np.asarray(self.axis, dtype=float)
        u = u / np.linalg.norm(u)
        full = harmonic_matrix(self.ell, u)[0]
        full[: self.ell**2] = 0.0
        return full / math.sqrt(kernel_G(self.ell, 2, 1.0))

    def apply_values(self, values, rule, *, strict=True):
        if strict and rule.exactness < 2 * self.ell:
            from .operators import ExactnessError

            raise ExactnessError(f"{self.label} needs exactness >= {2 * self.ell}")
        psi = self.psi_coefficients()
        b = analyze_values(values, self.ell, rule)
        return (b @ psi)[:, None] * psi[None, :]


def rotated_axis(angle: float) -> tuple:
    """The north pole rotated by ``angle`` toward +x."""
    return (math.sin(angle), 0.0, math.cos(angle))


def _thresholds(op) -> list[float]:
    if isinstance(op, OperatorSpec):
        return [op.lam] if op.kind in ("lasso", "hard") else []
    if isinstance(op, Composed):
        return [lam for sub in op.ops for lam in _thresholds(sub)]
    if isinstance(op, LinearCombination):
        return [lam for _, sub in op.terms for lam in _thresholds(sub)]
    return []


# ---------------------------------------------------------------------------
# Probes
# ---------------------------------------------------------------------------


@dataclass
class Probes:
    values: np.ndarray
    labels: list = field(default_factory=list)

    def __len__(self) -> int:
        return self.values.shape[0]

    def subset(self, mask: np.ndarray) -> "Probes":
        return Probes(self.values[mask], [lab for lab, keep in zip(self.labels, mask) if keep])

    def __add__(self, other: "Probes") -> "Probes":
        return Probes(np.vstack([self.values, other.values]), self.labels + other.labels)


def cell_rng(seed: int, law_id: str) -> np.random.Generator:
    return np.random.default_rng([int(seed), zlib.crc32(law_id.encode())])


def corpus_probes(corpus: Sequence, rule: QuadratureRule) -> Probes:
    labels = [f"corpus[{i}]{':' + f.name if getattr(f, 'name', '') else ''}" for i, f in enumerate(corpus)]
    return Probes(value_matrix(corpus, rule), labels)


def random_probes(rule: QuadratureRule, degree: int, rng: np.random.Generator, count: int = RANDOM_DRAWS) -> Probes:
    """Half Gaussian node noise, half random polynomials of degree + 2."""
    half = count // 2
    noise = rng.standard_normal((half, rule.size))
    coeffs = rng.uniform(-1.0, 1.0, (count - half, (degree + 3) ** 2))
    polys = synthesize_values(coeffs, rule)
    labels = [f"random_nodes[{i}]" for i in range(half)] + [f"random_poly[{i}]" for i in range(count - half)]
    return Probes(np.vstack([noise, polys]), labels)


def crafted_probes(rule: QuadratureRule, degree: int, lams: Sequence[float] = ()) -> Probes:
    """Scaled zonal harmonics c * Y_{ell,1}, ell <= degree.

    For each ell the scales run [lam + 1, lam / 2, 2 lam + 1] per threshold
    level and then 1, so adjacent rows pair a surviving coefficient with a
    killed one.
    """
    basis = rule.basis(degree)
    rows, labels = [], []
    scales = [s for lam in lams for s in (lam + 1.0, lam / 2.0, 2.0 * lam + 1.0)] + [1.0]
    for ell in range(degree + 1):
        col = basis[:, ell * ell]
        for s in scales:
            rows.append(s * col)
            labels.append(f"{s:g}*Y({ell},1)")
    return Probes(np.vstack(rows), labels)


def standard_probes(op, corpus, rule: QuadratureRule, rng, *, random_count: int = RANDOM_DRAWS) -> Probes:
    lams = _thresholds(op)
    probes = corpus_probes(corpus, rule) if corpus else Probes(np.zeros((0, rule.size)), [])
    probes = probes + random_probes(rule, op.degree, rng, random_count) + crafted_probes(rule, op.degree, lams)
    return guard(probes, lams, op.degree, rule)


def guard(probes: Probes, lams: Sequence[float], degree: int, rule: QuadratureRule) -> Probes:
    """Drop probes with a coefficient within GUARD of a threshold level."""
    if not lams or len(probes) == 0:
        return probes
    a = np.abs(analyze_values(probes.values, degree, rule))
    keep = np.ones(len(probes), dtype=bool)
    for lam in lams:
        keep &= ~np.any(np.abs(a - lam) < GUARD, axis=1)
    return probes.subset(keep)


def _norms(values: np.ndarray, rule: QuadratureRule) -> np.ndarray:
    return np.sqrt(np.maximum(inner_rows(values, values, rule), 0.0))


# ---------------------------------------------------------------------------
# Residuals
# ---------------------------------------------------------------------------


def _values(f, rule) -> np.ndarray:
    return node_values(f, rule)[None, :]


def adjoint_residual(spec, f, g, rule: QuadratureRule) -> float:
    """|<Tf, g>_N - <f, Tg>_N| with Tf, Tg synthesized at the nodes."""
    fv, gv = _values(f, rule), _values(g, rule)
    tf = synthesize_values(spec.apply_values(fv, rule), rule)
    tg = synthesize_values(spec.apply_values(gv, rule), rule)
    return float(abs(inner_rows(tf, gv, rule)[0] - inner_rows(fv, tg, rule)[0]))


def idempotency_residual(spec, f, rule: QuadratureRule) -> float:
    """max-norm of the coefficients of T(Tf) - Tf."""
    fv = _values(f, rule)
    once = _pad(spec.apply_values(fv, rule), spec.degree)
    twice = _pad(compose_values([spec, spec], fv, rule), spec.degree)
    return float(np.max(np.abs(twice - once)))


def pythagorean_residual(spec, f, rule: QuadratureRule) -> float:
    """|<Tf, Tf>_N + <Tf - f, Tf - f>_N - <f, f>_N|."""
    fv = _values(f, rule)
    tf = synthesize_values(spec.apply_values(fv, rule), rule)
    return float(_pythagorean_rows(fv, tf, rule)[0])


def commutation_residual(spec_a, spec_b, f, rule: QuadratureRule) -> float:
    """max-norm of the coefficients of A(Bf) - B(Af)."""
    fv = _values(f, rule)
    return float(np.max(_commutator_rows(spec_a, spec_b, fv, rule)))


def _pythagorean_rows(values, tf, rule) -> np.ndarray:
    diff = tf - values
    return np.abs(inner_rows(tf, tf, rule) + inner_rows(diff, diff, rule) - inner_rows(values, values, rule))


def _commutator_rows(a, b, values, rule) -> np.ndarray:
    deg = max(a.degree, b.degree)
    ab = _pad(compose_values([a, b], values, rule), deg)
    ba = _pad(compose_values([b, a], values, rule), deg)
    return np.max(np.abs(ab - ba), axis=1)


def _relative(residuals: np.ndarray, scale: np.ndarray) -> np.ndarray:
    """residual / scale, with rows of zero scale contributing zero."""
    out = np.zeros_like(residuals)
    ok = scale > 0
    out[ok] = residuals[ok] / scale[ok]
    return out


def _worst(rel: np.ndarray, probes: Probes, extra: dict | None = None) -> tuple[float, dict]:
    if rel.size == 0:
        return 0.0, {}
    i = int(np.argmax(rel))
    wit = {"probe": probes.labels[i], "relative_residual": float(rel[i])}
    if extra:
        wit.update(extra)
    return float(rel[i]), wit


def adjoint_rows(op, probes: Probes, rule) -> tuple[np.ndarray, np.ndarray]:
    """Relative adjointness residuals, pairing probe i with probe i + 1."""
    v = probes.values
    g = np.roll(v, -1, axis=0)
    tf = synthesize_values(op.apply_values(v, rule), rule)
    tg = np.roll(tf, -1, axis=0)
    res = np.abs(inner_rows(tf, g, rule) - inner_rows(v, tg, rule))
    norms = _norms(v, rule)
    return _relative(res, norms * np.roll(norms, -1)), np.roll(np.arange(len(probes)), -1)


def idempotency_rows(op, probes: Probes, rule) -> np.ndarray:
    v = probes.values
    once = _pad(op.apply_values(v, rule), op.degree)
    twice = _pad(op.apply_values(synthesize_values(once, rule), rule), op.degree)
    return _relative(np.max(np.abs(twice - once), axis=1), _norms(v, rule))


def pythagorean_rows(op, probes: Probes, rule) -> np.ndarray:
    v = probes.values
    tf = synthesize_values(op.apply_values(v, rule), rule)
    return _relative(_pythagorean_rows(v, tf, rule), inner_rows(v, v, rule))


def difference_rows(op_a, op_b, probes: Probes, rule) -> np.ndarray:
    """Relative max-norm coefficient difference between two operators' actions."""
    deg = max(op_a.degree, op_b.degree)
    a = _pad(op_a.apply_values(probes.values, rule), deg)
    b = _pad(op_b.apply_values(probes.values, rule), deg)
    return _relative(np.max(np.abs(a - b), axis=1), _norms(probes.values, rule))


def projection_defect(op, probes: Probes, rule) -> tuple[float, dict]:
    """Largest relative self-adjointness or idempotency residual over the probes."""
    adj, partner = adjoint_rows(op, probes, rule)
    idem = idempotency_rows(op, probes, rule)
    r_adj, w_adj = _worst(adj, probes)
    r_idem, w_idem = _worst(idem, probes)
    if r_adj >= r_idem:
        w_adj["partner"] = probes.labels[int(partner[int(np.argmax(adj))])] if adj.size else None
        return r_adj, {"property": "self_adjoint", **w_adj, "idempotency_residual": r_idem}
    return r_idem, {"property": "idempotent", **w_idem, "self_adjoint_residual": r_adj}


def _report(law_id, residual, threshold, *, expect_violation=False, witness=None, samples=0, seed=0, rule=None):
    return CheckReport(
        law_id=law_id,
        residual_max=float(residual),
        threshold=threshold,
        expect_violation=expect_violation,
        witness=witness or {},
        samples=int(samples),
        seed=int(seed),
        rule=rule.describe() if rule is not None else {},
    )


# ---------------------------------------------------------------------------
# Projection laws
# ---------------------------------------------------------------------------


def self_adjoint_check(op, corpus, rule, *, seed=0, expect_violation=False, law_id=None) -> CheckReport:
    law_id = law_id or f"self_adjoint[{op.label}]"
    probes = standard_probes(op, corpus, rule, cell_rng(seed, law_id))
    rel, partner = adjoint_rows(op, probes, rule)
    worst, wit = _worst(rel, probes)
    if rel.size:
        wit["partner"] = probes.labels[int(partner[int(np.argmax(rel))])]
    wit["operator"] = op.label
    threshold = tol(VIOLATION_TOL if expect_violation else REL_TOL)
    return _report(law_id, worst, threshold, expect_violation=expect_violation, witness=wit,
                   samples=len(probes), seed=seed, rule=rule)


def idempotency_check(op, corpus, rule, *, seed=0, expect_violation=False, law_id=None) -> CheckReport:
    law_id = law_id or f"idempotent[{op.label}]"
    probes = standard_probes(op, corpus, rule, cell_rng(seed, law_id))
    worst, wit = _worst(idempotency_rows(op, probes, rule), probes)
    wit["operator"] = op.label
    threshold = tol(VIOLATION_TOL if expect_violation else REL_TOL)
    return _report(law_id, worst, threshold, expect_violation=expect_violation, witness=wit,
                   samples=len(probes), seed=seed, rule=rule)


def projection_check(op, corpus, rule, *, seed=0, law_id=None) -> CheckReport:
    """Self-adjointness and idempotency together (the operator is a hyper projection)."""
    law_id = law_id or f"projection[{op.label}]"
    probes = standard_probes(op, corpus, rule, cell_rng(seed, law_id))
    worst, wit = projection_defect(op, probes, rule)
    wit["operator"] = op.label
    return _report(law_id, worst, tol(REL_TOL), witness=wit, samples=len(probes), seed=seed, rule=rule)


def is_diagonal_projection(spec: OperatorSpec) -> bool | None:
    """Whether a linear diagonal spec has every multiplier in {0, 1}; None for thresholding kinds."""
    m = spec.multipliers()
    if m is None:
        return None
    return bool(np.all((m == 0.0) | (m == 1.0)))


# ---------------------------------------------------------------------------
# Semigroup membership and norm laws
# ---------------------------------------------------------------------------


def _family_sibling(spec: OperatorSpec) -> OperatorSpec | None:
    if spec.n == 0:
        return None
    if spec.kind == "hyper":
        return OperatorSpec.hyper(spec.n - 1)
    if spec.kind == "hard":
        return OperatorSpec.hard(spec.n - 1, spec.lam)
    return None


def semigroup_membership(spec, corpus, rule, *, seed=0, expect_violation=False, law_id=None) -> CheckReport:
    """Pythagorean identity on corpus and witnesses, plus a composition-closure spot check.

    For Hyper and Hard the closure check composes with the same kind one
    degree lower and compares with that lower-degree member of the family.
    """
    law_id = law_id or f"semigroup_membership[{spec.label}]"
    rng = cell_rng(seed, law_id)
    if expect_violation:
        probes = standard_probes(spec, corpus, rule, rng)
    else:
        probes = guard(corpus_probes(corpus, rule), _thresholds(spec), spec.degree, rule)
    rel = pythagorean_rows(spec, probes, rule)
    worst, wit = _worst(rel, probes)
    wit["operator"] = spec.label
    if not expect_violation:
        sibling = _family_sibling(spec)
        closure = 0.0
        if sibling is not None:
            closure = float(np.max(difference_rows(Composed((spec, sibling)), sibling, probes, rule), initial=0.0))
            wit["closure_pair"] = [spec.label, sibling.label]
        wit["closure_relative_residual"] = closure
        wit["pythagorean_relative_residual"] = worst
        worst = max(worst, closure)
    threshold = tol(PYTH_VIOLATION_TOL if expect_violation else REL_TOL)
    return _report(law_id, worst, threshold, expect_violation=expect_violation, witness=wit,
                   samples=len(probes), seed=seed, rule=rule)


def norm_bound_check(spec: OperatorSpec, corpus, rule, *, seed=0, random_count=RANDOM_DRAWS, law_id=None) -> CheckReport:
    """(i) <Tf, f>_N = ||Tf||^2 and (ii) ||Tf|| <= ||f|| in the discrete semi-norm."""
    if spec.kind not in ("hyper", "hard"):
        raise LawNotApplicableError(f"norm bound law applies to hyper and hard operators, not {spec.kind}")
    law_id = law_id or f"norm_bound[{spec.label}]"
    probes = standard_probes(spec, corpus, rule, cell_rng(seed, law_id), random_count=random_count)
    v = probes.values
    tf = synthesize_values(spec.apply_values(v, rule), rule)
    ff = inner_rows(v, v, rule)
    ident = _relative(np.abs(inner_rows(tf, v, rule) - inner_rows(tf, tf, rule)), ff)
    bound = _relative(np.maximum(_norms(tf, rule) - np.sqrt(np.maximum(ff, 0.0)), 0.0), np.sqrt(np.maximum(ff, 0.0)))
    r1, w1 = _worst(ident, probes)
    r2, w2 = _worst(bound, probes)
    wit = {"operator": spec.label, "identity": w1, "bound": w2}
    return _report(law_id, max(r1, r2), tol(REL_TOL), witness=wit, samples=len(probes), seed=seed, rule=rule)


def norm_one_check(n: int, rule, *, trials=50, seed=0, law_id=None) -> CheckReport:
    """||L_n p||_N = ||p||_N for random polynomials p of degree <= n."""
    law_id = law_id or f"norm_one[n={n}]"
    rng = cell_rng(seed, law_id)
    coeffs = rng.uniform(-1.0, 1.0, (trials, (n + 1) ** 2))
    v = synthesize_values(coeffs, rule)
    tf = synthesize_values(OperatorSpec.hyper(n).apply_values(v, rule), rule)
    res = np.abs(_norms(tf, rule) - _norms(v, rule))
    i = int(np.argmax(res))
    return _report(law_id, res[i], tol(COEF_TOL), witness={"trial": i, "norm": float(_norms(v, rule)[i])},
                   samples=trials, seed=seed, rule=rule)


def best_approx_check(f, n: int, rule, *, trials=500, seed=0, law_id=None) -> CheckReport:
    """Hyperinterpolation minimizes ||f - sum c Y||_N over coefficient vectors c.

    Trial 0 is c = a; every fifth trial adds a unit vector at one index
    (cycling through indices); the rest add Gaussian perturbations. Each
    trial must satisfy right^2 - left^2 = ||c - a||^2; the residual is the
    largest relative mismatch, and any left > right is recorded.
    """
    law_id = law_id or f"best_approximation[n={n}]"
    rng = cell_rng(seed, law_id)
    fv = node_values(f, rule)
    a = analyze_values(fv[None, :], n, rule)[0]
    dim = a.size
    pert = np.zeros((trials, dim))
    for t in range(1, trials):
        if t % 5 == 0:
            pert[t, (t // 5) % dim] = 1.0
        else:
            pert[t] = rng.standard_normal(dim)
    c = a[None, :] + pert
    resid = fv[None, :] - synthesize_values(c, rule)
    right2 = inner_rows(resid, resid, rule)
    left_res = fv - synthesize_values(a[None, :], rule)[0]
    left2 = float(inner_rows(left_res[None, :], left_res[None, :], rule)[0])
    gap = right2 - left2
    b2 = np.sum(pert * pert, axis=1)
    mismatch = np.abs(gap - b2) / np.maximum(1.0, b2)
    ordering = np.maximum(math.sqrt(max(left2, 0.0)) - np.sqrt(np.maximum(right2, 0.0)), 0.0)
    unit = [t for t in range(1, trials) if t % 5 == 0]
    unit_err = float(np.max(np.abs(gap[unit] - 1.0))) if unit else 0.0
    worst = max(float(np.max(mismatch)), float(np.max(ordering)), unit_err)
    wit = {
        "left_norm": math.sqrt(max(left2, 0.0)),
        "equality_case_gap": float(abs(math.sqrt(max(right2[0], 0.0)) - math.sqrt(max(left2, 0.0)))),
        "max_ordering_violation": float(np.max(ordering)),
        "max_unit_gap_error": unit_err,
        "min_right_minus_left": float(np.min(np.sqrt(np.maximum(right2[1:], 0.0)) - math.sqrt(max(left2, 0.0))))
        if trials > 1 else 0.0,
    }
    return _report(law_id, worst, tol(REL_TOL), witness=wit, samples=trials, seed=seed, rule=rule)


# ---------------------------------------------------------------------------
# Commutation with hyperinterpolation
# ---------------------------------------------------------------------------


def generalized_commutation_check(n: int, corpus, rule, *, draws=100, seed=0, corpus_draws=5, law_id=None) -> CheckReport:
    """GL(L f) = L(GL f) = GL f for random weight sequences a with a_0 = 1.

    Draw i pairs a random probe f_i with its own weights a_i; every corpus
    member is additionally paired with the first ``corpus_draws`` weights.
    All pairs go through one batched analysis per side.
    """
    law_id = law_id or f"generalized_commutes_with_hyper[n={n}]"
    rng = cell_rng(seed, law_id)
    hyper = OperatorSpec.hyper(n)
    weights = np.hstack([np.ones((draws, 1)), rng.uniform(-1.0, 1.0, (draws, n))])
    rand = random_probes(rule, n, rng, draws)
    cp = corpus_probes(corpus, rule)
    k = min(corpus_draws, draws)
    values = np.vstack([rand.values, np.repeat(cp.values, k, axis=0)])
    which = np.concatenate([np.arange(draws), np.tile(np.arange(k), len(cp))])
    labels = rand.labels + [lab for lab in cp.labels for _ in range(k)]
    mult = weights[which][:, index_degrees(n)]
    b = analyze_values(values, n, rule)
    direct = mult * b
    # GL(L f): re-analyze the synthesized hyperinterpolant, then weight.
    left = mult * hyper.apply_values(synthesize_values(b, rule), rule)
    # L(GL f): hyperinterpolate the synthesized GL f.
    right = hyper.apply_values(synthesize_values(direct, rule), rule)
    res = np.maximum(np.max(np.abs(left - direct), axis=1), np.max(np.abs(right - direct), axis=1))
    j = int(np.argmax(res))
    wit = {"draw": int(which[j]), "probe": labels[j], "a": weights[which[j]].tolist()}
    return _report(law_id, res[j], tol(COEF_TOL), witness=wit, samples=len(labels), seed=seed, rule=rule)


# ---------------------------------------------------------------------------
# Products, sums and differences of projections
# ---------------------------------------------------------------------------


def _require_projection(op, probes, rule):
    defect, _ = projection_defect(op, probes, rule)
    if defect > tol(REL_TOL):
        raise LawNotApplicableError(f"{op.label} is not a hyper projection (defect {defect:.3e})")


def _iff_report(law_id, condition, defect, probes, rule, seed, wit, equal_to=None, composite=None):
    """Shared verdict for the product, sum and difference laws.

    condition <= REL_TOL must come with defect <= REL_TOL (holds direction);
    condition > VIOLATION_TOL must come with defect > VIOLATION_TOL (fails
    direction). A condition between the bands is inconclusive.
    """
    wit.update({"condition_residual": condition, "projection_defect": defect})
    if condition <= tol(REL_TOL):
        residual = defect
        if equal_to is not None:
            eq = float(np.max(difference_rows(composite, equal_to, probes, rule), initial=0.0))
            wit["equals"] = equal_to.label
            wit["equality_residual"] = eq
            residual = max(residual, eq)
        wit["direction"] = "holds"
        return _report(law_id, residual, tol(REL_TOL), witness=wit, samples=len(probes), seed=seed, rule=rule)
    if condition > tol(VIOLATION_TOL):
        wit["direction"] = "fails"
        return _report(law_id, min(condition, defect), tol(VIOLATION_TOL), expect_violation=True,
                       witness=wit, samples=len(probes), seed=seed, rule=rule)
    wit["direction"] = "inconclusive"
    return _report(law_id, math.nan, tol(REL_TOL), witness=wit, samples=len(probes), seed=seed, rule=rule)


def _pair_probes(a, b, corpus, rule, law_id, seed):
    rng = cell_rng(seed, law_id)
    lams = _thresholds(a) + _thresholds(b)
    deg = max(a.degree, b.degree)
    probes = corpus_probes(corpus, rule) + random_probes(rule, deg, rng) + crafted_probes(rule, deg, lams)
    return guard(probes, lams, deg, rule)


def product_projection_check(a, b, corpus, rule, *, seed=0, equal_to=None, law_id=None) -> CheckReport:
    """AB is a hyper projection iff A and B commute."""
    law_id = law_id or f"product_projection[{a.label} | {b.label}]"
    probes = _pair_probes(a, b, corpus, rule, law_id, seed)
    _require_projection(a, probes, rule)
    _require_projection(b, probes, rule)
    scale = _norms(probes.values, rule)
    condition = float(np.max(_relative(_commutator_rows(a, b, probes.values, rule), scale)))
    composite = Composed((a, b))
    defect, wit = projection_defect(composite, probes, rule)
    wit = {"A": a.label, "B": b.label, "defect_witness": wit}
    return _iff_report(law_id, condition, defect, probes, rule, seed, wit, equal_to, composite)


def sum_projection_check(a, b, corpus, rule, *, seed=0, equal_to=None, law_id=None) -> CheckReport:
    """A + B is a hyper projection iff AB = 0 (tested in both orders)."""
    law_id = law_id or f"sum_projection[{a.label} | {b.label}]"
    probes = _pair_probes(a, b, corpus, rule, law_id, seed)
    _require_projection(a, probes, rule)
    _require_projection(b, probes, rule)
    scale = _norms(probes.values, rule)
    ab = np.max(np.abs(compose_values([a, b], probes.values, rule)), axis=1)
    ba = np.max(np.abs(compose_values([b, a], probes.values, rule)), axis=1)
    condition = float(np.max(_relative(np.maximum(ab, ba), scale)))
    total = LinearCombination(((1.0, a), (1.0, b)))
    defect, wit = projection_defect(total, probes, rule)
    wit = {"A": a.label, "B": b.label, "defect_witness": wit}
    return _iff_report(law_id, condition, defect, probes, rule, seed, wit, equal_to, total)


def difference_projection_check(t1, t2, corpus, rule, *, seed=0, equal_to=None, law_id=None) -> CheckReport:
    """T2 - T1 is a hyper projection iff T1 is a suboperator of T2.

    Suboperator: T1 T2 = T2 T1 = T1, and ||T1 f||_N <= ||T2 f||_N.
    """
    law_id = law_id or f"difference_projection[{t2.label} - {t1.label}]"
    probes = _pair_probes(t1, t2, corpus, rule, law_id, seed)
    _require_projection(t1, probes, rule)
    _require_projection(t2, probes, rule)
    v = probes.values
    scale = _norms(v, rule)
    deg = max(t1.degree, t2.degree)
    direct = _pad(t1.apply_values(v, rule), deg)
    c12 = np.max(np.abs(_pad(compose_values([t1, t2], v, rule), deg) - direct), axis=1)
    c21 = np.max(np.abs(_pad(compose_values([t2, t1], v, rule), deg) - direct), axis=1)
    n1 = _norms(synthesize_values(direct, rule), rule)
    n2 = _norms(synthesize_values(t2.apply_values(v, rule), rule), rule)
    crit = np.maximum(np.maximum(c12, c21), np.maximum(n1 - n2, 0.0))
    condition = float(np.max(_relative(crit, scale)))
    diff = LinearCombination(((1.0, t2), (-1.0, t1)))
    defect, wit = projection_defect(diff, probes, rule)
    wit = {"T1": t1.label, "T2": t2.label, "defect_witness": wit}
    return _iff_report(law_id, condition, defect, probes, rule, seed, wit, equal_to, diff)


# ---------------------------------------------------------------------------
# Hard-thresholding ideal and homomorphism
# ---------------------------------------------------------------------------


def fingerprint_probes(degree: int, rule, seed: int = 0, size: int = FINGERPRINT_SIZE) -> Probes:
    """Random polynomials of the given degree with U[-3, 3] coefficients."""
    rng = np.random.default_rng([int(seed), degree, 0xF1])
    coeffs = rng.uniform(-3.0, 3.0, (size, (degree + 1) ** 2))
    return Probes(synthesize_values(coeffs, rule), [f"fingerprint[{i}]" for i in range(size)])


def action_difference(op_a, op_b, probes: Probes, rule) -> float:
    """Largest absolute coefficient difference of two operators over the probes."""
    deg = max(op_a.degree, op_b.degree)
    a = _pad(op_a.apply_values(probes.values, rule), deg)
    b = _pad(op_b.apply_values(probes.values, rule), deg)
    return float(np.max(np.abs(a - b), initial=0.0))


def ideal_composition_check(m: int, n: int, lam, corpus, rule, *, seed=0, law_id=None) -> CheckReport:
    """L_m H_n = H_m H_n = H_min(m,n), coefficientwise, for each level in ``lam``."""
    lams = [float(lam)] if np.ndim(lam) == 0 else [float(x) for x in lam]
    law_id = law_id or f"ideal_composition[m={m},n={n}]"
    worst, wit, used, skipped = 0.0, {}, 0, {}
    k = min(m, n)
    for level in lams:
        base = corpus_probes(corpus, rule)
        probes = guard(base, [level], max(m, n), rule)
        skipped[f"{level:g}"] = [lab for lab in base.labels if lab not in set(probes.labels)]
        target = OperatorSpec.hard(k, level)
        for name, outer in (("hyper_hard", OperatorSpec.hyper(m)), ("hard_hard", OperatorSpec.hard(m, level))):
            comp = Composed((outer, OperatorSpec.hard(n, level)))
            r = action_difference(comp, target, probes, rule)
            if r > worst or not wit:
                worst, wit = r, {"lambda": level, "table": name, "expected": target.label}
        used += len(probes)
    wit["skipped_by_guard"] = skipped
    return _report(law_id, worst, tol(COEF_TOL), witness=wit, samples=used, seed=seed, rule=rule)


def minimality_witness(k: int, n: int, lam: float, corpus, rule, *, seed=0, law_id=None) -> CheckReport:
    """H_{k+1} L_k = H_k although neither H_{k+1} nor L_k is one of H_1..H_k.

    Membership is decided by action on the fingerprint probes; "different"
    means an action difference above VIOLATION_TOL.
    """
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    law_id = law_id or f"minimality_witness[k={k},n={n}]"
    probes = fingerprint_probes(n, rule, seed) + corpus_probes(corpus, rule)
    probes = guard(probes, [lam], n, rule)
    product = Composed((OperatorSpec.hard(k + 1, lam), OperatorSpec.hyper(k)))
    hk = OperatorSpec.hard(k, lam)
    members = [OperatorSpec.hard(j, lam) for j in range(1, k + 1)]
    eq = action_difference(product, hk, probes, rule)
    sep_h = min(action_difference(OperatorSpec.hard(k + 1, lam), s, probes, rule) for s in members)
    sep_l = min(action_difference(OperatorSpec.hyper(k), s, probes, rule) for s in members)
    separated = sep_h > tol(VIOLATION_TOL) and sep_l > tol(VIOLATION_TOL)
    wit = {
        "product": product.label,
        "equals": hk.label,
        "product_residual": eq,
        "hard_k_plus_1_distance_to_S": sep_h,
        "hyper_k_distance_to_S": sep_l,
        "lambda": lam,
    }
    residual = eq if separated else math.nan
    return _report(law_id, residual, tol(COEF_TOL), witness=wit, samples=len(probes), seed=seed, rule=rule)


def homomorphism_check(n: int, degrees: Sequence[int], lam: float, corpus, rule, *, seed=0, law_id=None) -> CheckReport:
    """L_n(T1 T2) f = (L_n T1)(L_n T2) f for T1, T2 in {Hyper(s), Hard(m, lam)}.

    All three families (hyper-hyper, mixed in both orders, hard-hard) run
    over every pair from ``degrees``; both sides are also compared with the
    expected minimal-degree member.
    """
    if max(degrees) > n:
        raise ValueError("all degrees must be <= n")
    law_id = law_id or f"homomorphism[n={n}]"
    ln = OperatorSpec.hyper(n)
    probes = guard(corpus_probes(corpus, rule), [lam], n, rule)
    worst, wit = 0.0, {}
    counts = {"hyper_hyper": 0, "hyper_hard": 0, "hard_hard": 0}
    for s1 in degrees:
        for s2 in degrees:
            k = min(s1, s2)
            cases = [
                ("hyper_hyper", OperatorSpec.hyper(s1), OperatorSpec.hyper(s2), OperatorSpec.hyper(k)),
                ("hyper_hard", OperatorSpec.hyper(s1), OperatorSpec.hard(s2, lam), OperatorSpec.hard(k, lam)),
                ("hyper_hard", OperatorSpec.hard(s1, lam), OperatorSpec.hyper(s2), OperatorSpec.hard(k, lam)),
                ("hard_hard", OperatorSpec.hard(s1, lam), OperatorSpec.hard(s2, lam), OperatorSpec.hard(k, lam)),
            ]
            for family, t1, t2, expected in cases:
                lhs = Composed((ln, t1, t2))
                rhs = Composed((ln, t1, ln, t2))
                r = max(action_difference(lhs, rhs, probes, rule), action_difference(lhs, expected, probes, rule))
                counts[family] += 1
                if r > worst or not wit:
                    worst, wit = r, {"family": family, "T1": t1.label, "T2": t2.label, "expected": expected.label}
    wit["cases"] = counts
    return _report(law_id, worst, tol(COEF_TOL), witness=wit, samples=len(probes), seed=seed, rule=rule)


# ---------------------------------------------------------------------------
# Nonnegativity, zero operator, quadratic forms
# ---------------------------------------------------------------------------


def nonnegativity_check(spec: OperatorSpec, corpus, rule, *, seed=0, law_id=None) -> CheckReport:
    """<Tf, f>_N >= 0; for Generalized with some a_ell < 0 a negative witness is required."""
    law_id = law_id or f"nonnegative[{spec.label}]"
    probes = standard_probes(spec, corpus, rule, cell_rng(seed, law_id))
    v = probes.values
    tf = synthesize_values(spec.apply_values(v, rule), rule)
    q = _relative(inner_rows(tf, v, rule), inner_rows(v, v, rule))
    i = int(np.argmin(q))
    wit = {"operator": spec.label, "probe": probes.labels[i], "min_relative_form": float(q[i])}
    expect_violation = spec.kind == "generalized" and min(spec.a) < 0
    residual = max(0.0, -float(q[i])) + 0.0
    threshold = tol(VIOLATION_TOL if expect_violation else REL_TOL)
    return _report(law_id, residual, threshold, expect_violation=expect_violation, witness=wit,
                   samples=len(probes), seed=seed, rule=rule)


def zero_operator_check(spec: OperatorSpec, corpus, rule, *, seed=0, law_id=None) -> CheckReport:
    """If <Tf, f>_N vanishes on the corpus then T acts as zero there.

    When the hypothesis fails the implication is vacuous: the report passes
    with ``applicable = False`` in the witness.
    """
    law_id = law_id or f"zero_operator[{spec.label}]"
    if spec.kind not in ("hyper", "hard"):
        raise LawNotApplicableError(f"zero-operator law is stated for semigroup members, not {spec.kind}")
    probes = guard(corpus_probes(corpus, rule), _thresholds(spec), spec.degree, rule)
    v = probes.values
    coeffs = spec.apply_values(v, rule)
    tf = synthesize_values(coeffs, rule)
    ff = inner_rows(v, v, rule)
    form = _relative(np.abs(inner_rows(tf, v, rule)), ff)
    applicable = bool(np.all(form <= tol(REL_TOL)))
    wit = {"operator": spec.label, "applicable": applicable, "max_relative_form": float(np.max(form, initial=0.0))}
    if not applicable:
        return _report(law_id, 0.0, tol(REL_TOL), witness=wit, samples=len(probes), seed=seed, rule=rule)
    out = _relative(np.sqrt(np.sum(coeffs * coeffs, axis=1)), np.sqrt(ff))
    residual = float(np.max(out, initial=0.0))
    threshold = math.sqrt(tol(REL_TOL))
    return _report(law_id, residual, threshold, witness=wit, samples=len(probes), seed=seed, rule=rule)


def quadratic_form_witness(op_a, op_b, rule, *, draws=100, seed=0, law_id=None) -> CheckReport:
    """Operators with different actions have different quadratic forms on some random draw."""
    law_id = law_id or f"quadratic_form_separates[{op_a.label} | {op_b.label}]"
    deg = max(op_a.degree, op_b.degree)
    fp = fingerprint_probes(deg, rule, seed)
    if action_difference(op_a, op_b, fp, rule) <= tol(COEF_TOL):
        raise LawNotApplicableError("the two operators act identically on the fingerprint probes")
    probes = random_probes(rule, deg, cell_rng(seed, law_id), draws)
    v = probes.values
    qa = inner_rows(synthesize_values(op_a.apply_values(v, rule), rule), v, rule)
    qb = inner_rows(synthesize_values(op_b.apply_values(v, rule), rule), v, rule)
    gap = _relative(np.abs(qa - qb), inner_rows(v, v, rule))
    worst, wit = _worst(gap, probes)
    return _report(law_id, worst, tol(VIOLATION_TOL), expect_violation=True, witness=wit,
                   samples=draws, seed=seed, rule=rule)


# ---------------------------------------------------------------------------
# Witnesses and diagnostics
# ---------------------------------------------------------------------------


def vanishing_witness(n: int, rule: QuadratureRule) -> SampledFunction:
    """Zonal polynomial of degree n + 1 vanishing at every node of ``build_rule(n)``.

    f(x) = prod_j (z - t_j) / prod_j (1 - t_j) over the Gauss-Legendre nodes
    t_j, so f is the Legendre polynomial P_{n+1}(z), equal to 1 at the north pole.
    """
    polar = rule.polar_nodes
    if polar is None:
        raise ValueError("vanishing witness needs a rule with known Gauss-Legendre structure")
    if polar.size != n + 1:
        raise ValueError(f"rule has {polar.size} polar nodes, build_rule({n}) has {n + 1}")
    t = np.array(polar)
    scale = float(np.prod(1.0 - t))

    def witness(x):
        z = np.asarray(x, dtype=float)[:, 2]
        return np.prod(z[:, None] - t[None, :], axis=1) / scale

    return SampledFunction(func=witness, name=f"vanishing{n}")


def vanishing_witness_check(n: int, *, law_id=None) -> CheckReport:
    from .quadrature import build_rule

    law_id = law_id or f"seminorm_vanishing_witness[n={n}]"
    rule = build_rule(n)
    f = vanishing_witness(n, rule)
    sn = semi_norm(f, rule)
    sup = float(np.max(np.abs(f(sup_grid()))))
    wit = {"semi_norm": sn, "grid_sup": sup, "sup_required": VANISH_SUP_MIN, "degree": n + 1}
    residual = sn if sup >= VANISH_SUP_MIN else math.nan
    return _report(law_id, residual, tol(VANISH_TOL), witness=wit, samples=rule.size, rule=rule)


def _kernel_D(a: Sequence[float], d: int, t):
    return sum(float(al) * kernel_G(ell, d, t) for ell, al in enumerate(a))


def generalized_kernel_bound(n: int, a: Sequence[float], d: int = 2, panels: int = 64) -> float:
    """Integral of (1 + n theta)^2 |D_n(cos theta)| sin^(d-1) theta over [0, pi].

    D_n = sum_ell a_ell G_ell. Composite Gauss-Legendre on ``panels`` equal
    panels, each also split at sign changes of D_n so |D_n| is smooth on
    every piece. Only this one n is evaluated.
    """
    if panels < 64:
        raise ValueError(f"need at least 64 panels, got {panels}")
    a = [float(v) for v in a]
    g = lambda th: _kernel_D(a, d, math.cos(th))  # noqa: E731
    scan = np.linspace(0.0, math.pi, 8 * panels + 1)
    vals = np.array([g(th) for th in scan])
    roots = [brentq(g, scan[i], scan[i + 1], xtol=1e-15)
             for i in range(scan.size - 1) if vals[i] * vals[i + 1] < 0]
    edges = np.unique(np.concatenate([np.linspace(0.0, math.pi, panels + 1), roots]))
    gl = gauss_legendre(max(20, len(a) + 10))
    total = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        th = 0.5 * (hi - lo) * gl.nodes + 0.5 * (hi + lo)
        f = (1.0 + n * th) ** 2 * np.abs(_kernel_D(a, d, np.cos(th))) * np.sin(th) ** (d - 1)
        total.append(0.5 * (hi - lo) * math.fsum(gl.weights * f))
    return math.fsum(total)


def kernel_bound_report(n: int, a: Sequence[float], d: int = 2, panels: int = 64, *, law_id=None) -> CheckReport:
    """Diagnostic value of the kernel integral, with a panel-doubling self-check."""
    law_id = law_id or f"generalized_kernel_integral[n={n},d={d}]"
    v1 = generalized_kernel_bound(n, a, d, panels)
    v2 = generalized_kernel_bound(n, a, d, 2 * panels)
    wit = {"value": v1, "value_doubled_panels": v2, "a": list(a), "note": "diagnostic for this n only"}
    return _report(law_id, abs(v1 - v2) / max(abs(v2), 1e-300), tol(1e-8), witness=wit, samples=panels)


def kernel_bound_constant_case(n: int) -> float:
    """Closed form of the integral for a = (1, 0, ..., 0) on S^2."""
    return (2.0 + 2.0 * n * math.pi + n * n * (math.pi**2 - 4.0)) / (4.0 * math.pi)


def threshold_dominance_check(spec: OperatorSpec, corpus, rule, *, law_id=None) -> CheckReport:
    """Per corpus member, ||T f||_L2 / sup|f| <= the Hyper(n) ratio (+ REL_TOL) and finite."""
    law_id = law_id or f"hc_dominance[{spec.label}]"
    mine = hc_ratios(spec, corpus, rule)
    ref = hc_ratios(OperatorSpec.hyper(spec.n), corpus, rule)
    excess, worst_i, finite = 0.0, -1, True
    for i, (r, h) in enumerate(zip(mine, ref)):
        if r is None:
            continue
        finite &= math.isfinite(r)
        if r - h > excess or worst_i < 0:
            excess, worst_i = max(r - h, 0.0), i
    wit = {"operator": spec.label, "ratios": mine, "hyper_ratios": ref, "worst_member": worst_i}
    return _report(law_id, excess if finite else math.nan, tol(REL_TOL), witness=wit, samples=len(corpus), rule=rule)


def zonal_pair(ell: int, angle: float = math.pi / 3) -> tuple[ZonalProjection, ZonalProjection]:
    """Two rank-one projections whose axes differ by ``angle``; overlap P_ell(cos angle)."""
    return ZonalProjection((0.0, 0.0, 1.0), ell), ZonalProjection(rotated_axis(angle), ell)


def zonal_overlap(ell: int, angle: float = math.pi / 3) -> float:
    return float(legendre_P(ell, math.cos(angle)))
