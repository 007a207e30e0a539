"""Hyperinterpolation-class operators as diagonal coefficient transforms.

Every operator here is ``transform(analyze(f))``: the discrete Fourier
coefficients <f, Y_{ell k}>_N are computed with the quadrature rule and then
mapped entrywise. Functions can be passed as callables on (M, 3) point arrays,
as :class:`SampledFunction` objects, or as plain node-value arrays.

Batched internals work on value matrices of shape (F, N) (one row per
function) and coefficient matrices of shape (F, D).
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .quadrature import NodeEvaluationError, QuadratureRule, compensated_sum, weighted_node_sum
from .reports import CheckReport, tol
from .sphere_basis import (
    HarmonicIndex,
    SpherePoint,
    UnsupportedDimensionError,
    harmonic_matrix,
    index_degrees,
    iter_indices,
    space_dimension,
    surface_area,
)

KINDS = ("hyper", "lasso", "hard", "filtered", "generalized", "partial_sum")

SUP_GRID_SHAPE = (80, 160)
HC_BOUND_D2 = 2.0 * math.sqrt(math.pi) * 1.05


class ExactnessError(ValueError):
    """The rule's exactness is too low for the requested degree."""


class RuleMismatchError(ValueError):
    """Node-aligned samples were bound to a different quadrature rule."""


class DegreeMismatchError(ValueError):
    pass


class FilterValidationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Functions and coefficient vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Either a vectorized handle on S^2 or values aligned to one rule's nodes."""

    func: Callable[[np.ndarray], np.ndarray] | None = None
    values: np.ndarray | None = None
    rule_fingerprint: str | None = None
    name: str = ""

    def __post_init__(self):
        if (self.func is None) == (self.values is None):
            raise ValueError("give exactly one of func or values")
        if self.values is not None:
            vals = np.array(self.values, dtype=float)
            vals.setflags(write=False)
            object.__setattr__(self, "values", vals)

    @classmethod
    def on_rule(cls, values, rule: QuadratureRule, name: str = "") -> "SampledFunction":
        values = np.asarray(values, dtype=float)
        if values.shape != (rule.size,):
            raise RuleMismatchError(f"expected {rule.size} node values, got shape {values.shape}")
        return cls(values=values, rule_fingerprint=rule.fingerprint, name=name)

    @property
    def node_aligned(self) -> bool:
        return self.values is not None

    def at_nodes(self, rule: QuadratureRule) -> np.ndarray:
        if self.values is not None:
            if self.rule_fingerprint is not None and self.rule_fingerprint != rule.fingerprint:
                raise RuleMismatchError(
                    f"samples{' ' + self.name if self.name else ''} belong to rule "
                    f"{self.rule_fingerprint}, not {rule.fingerprint}"
                )
            if self.values.shape != (rule.size,):
                raise RuleMismatchError(f"expected {rule.size} node values, got {self.values.size}")
            return self.values
        return _evaluate(self.func, rule.nodes)

    def __call__(self, points) -> np.ndarray:
        if self.func is None:
            raise TypeError("node-aligned samples cannot be evaluated off the rule")
        return _evaluate(self.func, np.atleast_2d(np.asarray(points, dtype=float)))


def _evaluate(func, points: np.ndarray) -> np.ndarray:
    vals = np.asarray(func(points), dtype=float)
    if vals.shape == ():
        vals = np.full(points.shape[0], float(vals))
    return vals


def node_values(f, rule: QuadratureRule) -> np.ndarray:
    """Values of ``f`` at the rule's nodes as a float array of shape (N,).

    Accepts numbers (constant functions), :class:`SampledFunction`, raw node
    arrays of length N, or callables taking an (M, 3) array.
    """
    if isinstance(f, SampledFunction):
        vals = f.at_nodes(rule)
    elif isinstance(f, (int, float, np.floating, np.integer)):
        vals = np.full(rule.size, float(f))
    elif isinstance(f, np.ndarray) or isinstance(f, (list, tuple)):
        vals = np.asarray(f, dtype=float)
        if vals.shape != (rule.size,):
            raise RuleMismatchError(f"expected {rule.size} node values, got shape {vals.shape}")
    elif callable(f):
        vals = _evaluate(f, rule.nodes)
    else:
        raise TypeError(f"cannot sample object of type {type(f).__name__}")
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        j = int(bad[0])
        raise NodeEvaluationError(f"non-finite value at node {j} {tuple(rule.nodes[j])}")
    return vals


def value_matrix(functions: Iterable, rule: QuadratureRule) -> np.ndarray:
    """Stack node values of several functions into an (F, N) array."""
    rows = [node_values(f, rule) for f in functions]
    if not rows:
        return np.zeros((0, rule.size))
    return np.vstack(rows)


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Coefficients indexed by (ell, k), ell <= degree, stored in flat order."""

    degree: int
    values: np.ndarray
    dim_d: int = 2

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if self.dim_d != 2:
            raise UnsupportedDimensionError("coefficient vectors are implemented for d = 2 only")
        expected = space_dimension(self.dim_d, self.degree)
        if vals.shape != (expected,):
            raise ValueError(f"degree {self.degree} needs {expected} coefficients, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("coefficients must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, degree: int) -> "CoefficientVector":
        return cls(degree, np.zeros((degree + 1) ** 2))

    @classmethod
    def unit(cls, degree: int, index) -> "CoefficientVector":
        index = _as_index(index)
        vals = np.zeros((degree + 1) ** 2)
        vals[index.flat] = 1.0
        return cls(degree, vals)

    def __getitem__(self, index) -> float:
        index = _as_index(index).validate(self.dim_d)
        if index.ell > self.degree:
            raise KeyError(f"degree {index.ell} beyond vector degree {self.degree}")
        return float(self.values[index.flat])

    def __len__(self) -> int:
        return int(self.values.size)

    def items(self):
        for idx in iter_indices(self.degree):
            yield idx, float(self.values[idx.flat])

    def resized(self, degree: int) -> "CoefficientVector":
        """Truncate or zero-pad to ``degree``."""
        size = (degree + 1) ** 2
        vals = np.zeros(size)
        m = min(size, self.values.size)
        vals[:m] = self.values[:m]
        return CoefficientVector(degree, vals)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("l,k,value\n")
        for idx, v in self.items():
            buf.write(f"{idx.ell},{idx.k},{v:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CoefficientVector":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty coefficient CSV")
        degree = max(int(r["l"]) for r in rows)
        vals = np.full((degree + 1) ** 2, np.nan)
        for r in rows:
            idx = HarmonicIndex(int(r["l"]), int(r["k"])).validate(2)
            vals[idx.flat] = float(r["value"])
        if np.any(np.isnan(vals)):
            raise ValueError("coefficient CSV does not list every index up to its degree")
        return cls(degree, vals)


def _as_index(index) -> HarmonicIndex:
    return index if isinstance(index, HarmonicIndex) else HarmonicIndex(*index)


# ---------------------------------------------------------------------------
# Inner product, analysis, synthesis
# ---------------------------------------------------------------------------


def discrete_inner(f, g, rule: QuadratureRule) -> float:
    """<f, g>_N = sum_j w_j f(x_j) g(x_j), compensated, fixed node order."""
    return compensated_sum(rule.weights * (node_values(f, rule) * node_values(g, rule)))


def semi_norm(f, rule: QuadratureRule) -> float:
    """||f||_{l2(w)} = <f, f>_N^(1/2); zero for any f vanishing at all nodes."""
    return math.sqrt(max(discrete_inner(f, f, rule), 0.0))


def inner_rows(u: np.ndarray, v: np.ndarray, rule: QuadratureRule) -> np.ndarray:
    """Row-wise <u_i, v_i>_N for (F, N) value matrices."""
    return compensated_sum((u * v * rule.weights[None, :]).T)


def _check_exactness(rule: QuadratureRule, degree: int, strict: bool, what: str) -> None:
    if rule.exactness >= 2 * degree:
        return
    msg = f"{what} needs quadrature exactness >= {2 * degree}, rule has {rule.exactness}"
    if strict:
        raise ExactnessError(msg)
    warnings.warn(msg, stacklevel=3)


def analyze_values(values: np.ndarray, n: int, rule: QuadratureRule) -> np.ndarray:
    """Discrete Fourier coefficients of value rows: (F, N) -> (F, (n+1)**2)."""
    values = np.atleast_2d(values)
    return weighted_node_sum(rule.weights, values, rule.basis(n))


def synthesize_values(coeffs: np.ndarray, rule: QuadratureRule) -> np.ndarray:
    """Evaluate coefficient rows (F, D) at the rule's nodes -> (F, N)."""
    coeffs = np.atleast_2d(coeffs)
    degree = math.isqrt(coeffs.shape[1]) - 1
    return coeffs @ rule.basis(degree).T


def analyze(f, n: int, rule: QuadratureRule) -> CoefficientVector:
    """Coefficients <f, Y_{ell k}>_N for every ell <= n.

    Warns (does not refuse) when the rule is not exact to degree 2n.
    """
    _check_exactness(rule, n, strict=False, what=f"analysis to degree {n}")
    vals = node_values(f, rule)
    return CoefficientVector(n, analyze_values(vals[None, :], n, rule)[0])


def synthesize(c: CoefficientVector, x) -> float | np.ndarray:
    """sum_{ell, k} c_{ell k} Y_{ell k}(x) at a SpherePoint or an (M, 3) array."""
    if c.dim_d != 2:
        raise UnsupportedDimensionError("synthesis is implemented for d = 2 only")
    if isinstance(x, SpherePoint):
        if x.dim_d != 2:
            raise UnsupportedDimensionError(f"cannot evaluate at a point of S^{x.dim_d}")
        return float((harmonic_matrix(c.degree, x) @ c.values)[0])
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    out = harmonic_matrix(c.degree, pts) @ c.values
    return float(out[0]) if single else out


def poly_l2_norm(c: CoefficientVector | np.ndarray) -> float:
    """L2(S^2) norm of the polynomial with these coefficients (Parseval)."""
    vals = c.values if isinstance(c, CoefficientVector) else np.asarray(c, dtype=float)
    return math.sqrt(math.fsum(vals * vals))


# ---------------------------------------------------------------------------
# Thresholding and filters
# ---------------------------------------------------------------------------


def soft_threshold(a, k):
    """eta_S(a, k) = max(0, a - k) + min(0, a + k)."""
    scalar = np.ndim(a) == 0 and np.ndim(k) == 0
    if np.any(np.asarray(k) < 0):
        raise ValueError("threshold level must be nonnegative")
    a = np.asarray(a, dtype=float)
    out = np.maximum(0.0, a - k) + np.minimum(0.0, a + k)
    return float(out) if scalar else out


def hard_threshold(a, k):
    """eta_H(a, k) = a if |a| > k else 0."""
    scalar = np.ndim(a) == 0 and np.ndim(k) == 0
    if np.any(np.asarray(k) < 0):
        raise ValueError("threshold level must be nonnegative")
    a = np.asarray(a, dtype=float)
    out = np.where(np.abs(a) > k, a, 0.0)
    return float(out) if scalar else out


def _h1(x: np.ndarray) -> np.ndarray:
    return np.where(x <= 0.5, 1.0, np.where(x < 1.0, np.sin(np.pi * x) ** 2, 0.0))


def _h2(x: np.ndarray) -> np.ndarray:
    return np.where(x <= 0.75, 1.0, np.where(x < 1.0, np.sin(2.0 * np.pi * x) ** 2, 0.0))


@dataclass(frozen=True)
class Filter:
    """Filter h with h = 1 on [0, s] and h = 0 on [1, inf).

    Use :meth:`h1`, :meth:`h2` or :meth:`custom`; custom handles are
    checked against the two flat pieces when constructed.
    """

    kind: str
    s: float
    func: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("h1", "h2", "custom"):
            raise ValueError(f"unknown filter kind {self.kind!r}")
        if not 0.0 < self.s < 1.0:
            raise FilterValidationError(f"filter onset s must lie in (0, 1), got {self.s}")
        if self.kind == "custom":
            if self.func is None:
                raise FilterValidationError("custom filter needs a function")
            lo = np.linspace(0.0, self.s, 257)
            hi = np.concatenate([np.linspace(1.0, 4.0, 257), [10.0, 1e3]])
            v_lo = np.asarray(self.func(lo), dtype=float)
            v_hi = np.asarray(self.func(hi), dtype=float)
            if np.max(np.abs(v_lo - 1.0)) > 1e-12:
                raise FilterValidationError(f"custom filter must equal 1 on [0, {self.s}]")
            if np.max(np.abs(v_hi)) > 1e-12:
                raise FilterValidationError("custom filter must vanish on [1, inf)")

    @classmethod
    def h1(cls) -> "Filter":
        return cls("h1", 0.5)

    @classmethod
    def h2(cls) -> "Filter":
        return cls("h2", 0.75)

    @classmethod
    def custom(cls, func: Callable, s: float) -> "Filter":
        return cls("custom", s, func)

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ValueError("filters are defined on [0, inf)")
        if self.kind == "h1":
            out = _h1(x)
        elif self.kind == "h2":
            out = _h2(x)
        else:
            out = np.asarray(self.func(x), dtype=float)
        return float(out) if scalar else out

    def to_dict(self) -> dict:
        if self.kind == "custom":
            raise ValueError("custom filters hold a Python callable and cannot be serialized")
        return {"kind": self.kind, "s": self.s}

    @classmethod
    def from_dict(cls, data: dict) -> "Filter":
        kind = str(data.get("kind", "")).lower()
        if kind == "h1":
            f = cls.h1()
        elif kind == "h2":
            f = cls.h2()
        else:
            raise ValueError(f"filter kind must be 'h1' or 'h2' in files, got {kind!r}")
        if "s" in data and abs(float(data["s"]) - f.s) > 1e-15:
            raise ValueError(f"filter {kind} has s = {f.s}, file says {data['s']}")
        return f


def filter_eval(h: Filter, x):
    return h(x)


# ---------------------------------------------------------------------------
# Operator specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorSpec:
    """Declarative description of one diagonal hyperinterpolation-class operator.

    Prefer the named constructors (:meth:`hyper`, :meth:`lasso`, ...).
    ``mu`` holds Lasso penalties as sorted ((ell, k), value) pairs; indices
    not listed get penalty 1.
    """

    kind: str
    n: int
    lam: float | None = None
    mu: tuple = ()
    filter: Filter | None = None
    a: tuple | None = None
    band: tuple[int, int] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}; expected one of {KINDS}")
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"degree must be a nonnegative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.kind in ("lasso", "hard"):
            if self.lam is None or not self.lam > 0:
                raise ValueError(f"{self.kind} needs a positive lambda, got {self.lam!r}")
            object.__setattr__(self, "lam", float(self.lam))
        if self.kind == "lasso":
            mu = tuple(sorted((tuple(map(int, key)), float(v)) for key, v in dict(self.mu).items()))
            for (ell, k), v in mu:
                HarmonicIndex(ell, k).validate(2)
                if not v > 0:
                    raise ValueError(f"Lasso penalty at {(ell, k)} must be positive, got {v}")
            object.__setattr__(self, "mu", mu)
        elif self.mu:
            raise ValueError("penalties mu apply to lasso operators only")
        else:
            object.__setattr__(self, "mu", ())
        if self.kind == "filtered" and not isinstance(self.filter, Filter):
            raise ValueError("filtered operator needs a Filter")
        if self.kind == "generalized":
            if self.a is None or len(self.a) != self.n + 1:
                raise ValueError(f"generalized operator needs n + 1 = {self.n + 1} weights a_0..a_n")
            a = tuple(float(v) for v in self.a)
            if not all(math.isfinite(v) for v in a):
                raise ValueError("generalized weights must be finite")
            if abs(a[0] - 1.0) > 1e-12:
                raise ValueError(f"generalized weights need a_0 = 1 (unit kernel mass), got {a[0]}")
            object.__setattr__(self, "a", a)
        if self.kind == "partial_sum":
            if self.band is None or len(self.band) != 2:
                raise ValueError("partial_sum needs a band (l_min, l_max)")
            lo, hi = (int(v) for v in self.band)
            if not 0 <= lo <= hi <= self.n:
                raise ValueError(f"band must satisfy 0 <= l_min <= l_max <= n, got {(lo, hi)} with n = {self.n}")
            object.__setattr__(self, "band", (lo, hi))

    # constructors -----------------------------------------------------------

    @classmethod
    def hyper(cls, n: int) -> "OperatorSpec":
        return cls("hyper", n)

    @classmethod
    def lasso(cls, n: int, lam: float, mu: dict | None = None) -> "OperatorSpec":
        return cls("lasso", n, lam=lam, mu=mu or {})

    @classmethod
    def hard(cls, n: int, lam: float) -> "OperatorSpec":
        return cls("hard", n, lam=lam)

    @classmethod
    def filtered(cls, n: int, h: Filter | None = None) -> "OperatorSpec":
        return cls("filtered", n, filter=h or Filter.h1())

    @classmethod
    def generalized(cls, n: int, a: Sequence[float]) -> "OperatorSpec":
        return cls("generalized", n, a=tuple(a))

    @classmethod
    def partial_sum(cls, n: int, band: tuple[int, int]) -> "OperatorSpec":
        return cls("partial_sum", n, band=tuple(band))

    # behaviour --------------------------------------------------------------

    @property
    def degree(self) -> int:
        return self.n

    @property
    def label(self) -> str:
        extra = ""
        if self.kind in ("lasso", "hard"):
            extra = f",lam={self.lam:g}"
        elif self.kind == "filtered":
            extra = f",{self.filter.kind}"
        elif self.kind == "partial_sum":
            extra = f",band={self.band[0]}-{self.band[1]}"
        return f"{self.kind}(n={self.n}{extra})"

    def multipliers(self) -> np.ndarray | None:
        """Per-index factors for the linear kinds, None for thresholding kinds."""
        ells = index_degrees(self.n)
        if self.kind == "hyper":
            return np.ones(ells.size)
        if self.kind == "filtered":
            if self.n == 0:
                return np.ones(1)
            return self.filter(ells / self.n)
        if self.kind == "generalized":
            return np.asarray(self.a)[ells]
        if self.kind == "partial_sum":
            lo, hi = self.band
            return ((ells >= lo) & (ells <= hi)).astype(float)
        return None

    def penalties(self) -> np.ndarray:
        pen = np.ones((self.n + 1) ** 2)
        for (ell, k), v in self.mu:
            if ell <= self.n:
                pen[HarmonicIndex(ell, k).flat] = v
        return pen

    def transform(self, coeffs: np.ndarray) -> np.ndarray:
        """Apply the diagonal map to coefficient rows (..., D >= (n+1)**2)."""
        coeffs = np.asarray(coeffs, dtype=float)
        size = (self.n + 1) ** 2
        if coeffs.shape[-1] < size:
            raise DegreeMismatchError(
                f"{self.label} needs coefficients through degree {self.n}, got {coeffs.shape[-1]} values"
            )
        c = coeffs[..., :size]
        if self.kind == "lasso":
            return soft_threshold(c, self.lam * self.penalties())
        if self.kind == "hard":
            return hard_threshold(c, self.lam)
        return c * self.multipliers()

    def apply_values(self, values: np.ndarray, rule: QuadratureRule, *, strict: bool = True) -> np.ndarray:
        _check_exactness(rule, self.n, strict, self.label)
        return self.transform(analyze_values(values, self.n, rule))

    # serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "n": self.n}
        if self.lam is not None:
            out["lambda"] = self.lam
        if self.mu:
            out["mu"] = {f"{ell},{k}": v for (ell, k), v in self.mu}
        if self.filter is not None:
            out["filter"] = self.filter.to_dict()
        if self.a is not None:
            out["a"] = list(self.a)
        if self.band is not None:
            out["band"] = list(self.band)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "OperatorSpec":
        kind = data.get("kind")
        if "n" not in data:
            raise ValueError("operator spec needs 'n'")
        mu = {}
        for key, v in (data.get("mu") or {}).items():
            ell, k = (int(p) for p in str(key).split(","))
            mu[(ell, k)] = float(v)
        filt = Filter.from_dict(data["filter"]) if data.get("filter") else None
        if kind == "filtered" and filt is None:
            filt = Filter.h1()
        return cls(
            kind=kind,
            n=data["n"],
            lam=data.get("lambda"),
            mu=mu,
            filter=filt,
            a=tuple(data["a"]) if data.get("a") is not None else None,
            band=tuple(data["band"]) if data.get("band") is not None else None,
        )

    @classmethod
    def from_json(cls, text: str) -> "OperatorSpec":
        return cls.from_dict(json.loads(text))


def coefficient_transform(spec: OperatorSpec, c: CoefficientVector) -> CoefficientVector:
    """Diagonal action of ``spec`` on ``c``; output has degree ``spec.n``."""
    if c.degree < spec.n:
        raise DegreeMismatchError(f"{spec.label} needs coefficients of degree >= {spec.n}, got {c.degree}")
    return CoefficientVector(spec.n, spec.transform(c.values))


def apply(spec: OperatorSpec, f, rule: QuadratureRule, *, strict: bool = True) -> CoefficientVector:
    """T f = transform(analyze(f)); refuses rules with exactness < 2n unless ``strict=False``."""
    vals = node_values(f, rule)
    return CoefficientVector(spec.n, spec.apply_values(vals[None, :], rule, strict=strict)[0])


def compose_values(ops: Sequence, values: np.ndarray, rule: QuadratureRule, *, strict: bool = True) -> np.ndarray:
    """Apply ``ops[-1]`` first, then each earlier operator, re-sampling at the nodes in between."""
    if not ops:
        raise ValueError("need at least one operator")
    top = max(op.degree for op in ops)
    _check_exactness(rule, top, strict, "composition")
    values = np.atleast_2d(values)
    coeffs = ops[-1].apply_values(values, rule, strict=strict)
    for op in reversed(ops[:-1]):
        coeffs = op.apply_values(synthesize_values(coeffs, rule), rule, strict=strict)
    return coeffs


def compose(outer: OperatorSpec, inner: OperatorSpec, f, rule: QuadratureRule, *, strict: bool = True) -> CoefficientVector:
    """(outer o inner) f: inner's polynomial is re-sampled at the nodes before outer acts."""
    vals = node_values(f, rule)
    return CoefficientVector(outer.n, compose_values([outer, inner], vals[None, :], rule, strict=strict)[0])


# ---------------------------------------------------------------------------
# HC-class scan
# ---------------------------------------------------------------------------


def sup_grid(shape: tuple[int, int] = SUP_GRID_SHAPE) -> np.ndarray:
    """Equiangular (theta, phi) grid with poles included, as (M, 3) points."""
    n_theta, n_phi = shape
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    st = np.sin(th)
    return np.column_stack([(st * np.cos(ph)).ravel(), (st * np.sin(ph)).ravel(), np.cos(th).ravel()])


def sup_norm_estimate(f, rule: QuadratureRule, grid: np.ndarray | None = None) -> float:
    """max |f| over the rule's nodes and the evaluation grid (nodes only for node-aligned data)."""
    m = float(np.max(np.abs(node_values(f, rule))))
    handle = None
    if isinstance(f, SampledFunction):
        handle = f.func
    elif callable(f) and not isinstance(f, np.ndarray):
        handle = f
    if handle is not None:
        pts = sup_grid() if grid is None else grid
        m = max(m, float(np.max(np.abs(_evaluate(handle, pts)))))
    return m


def hc_ratios(spec: OperatorSpec, corpus: Sequence, rule: QuadratureRule) -> list[float | None]:
    """||T f||_{L2} / sup|f| per corpus member; None for functions that vanish on the sup set."""
    vals = value_matrix(corpus, rule)
    coeffs = spec.apply_values(vals, rule)
    grid = sup_grid()
    out: list[float | None] = []
    for f, c in zip(corpus, coeffs):
        sup = sup_norm_estimate(f, rule, grid)
        out.append(None if sup == 0.0 else poly_l2_norm(c) / sup)
    return out


def hc_membership_scan(
    spec: OperatorSpec,
    corpus: Sequence,
    rule: QuadratureRule,
    bound: float | None = None,
) -> CheckReport:
    """Empirical L2-output / sup-input ratio over a corpus.

    Passes iff the largest ratio is at most ``bound`` (default 2 sqrt(pi) x 1.05,
    the ratio of the constant function with 5% headroom).
    """
    if not corpus:
        raise ValueError("corpus must be nonempty")
    if bound is None:
        if rule.dim_d != 2:
            raise UnsupportedDimensionError("default bound is defined for d = 2")
        bound = HC_BOUND_D2
    ratios = hc_ratios(spec, corpus, rule)
    kept = [(i, r) for i, r in enumerate(ratios) if r is not None]
    skipped = [i for i, r in enumerate(ratios) if r is None]
    worst_i, worst = max(kept, key=lambda p: p[1]) if kept else (-1, 0.0)
    return CheckReport(
        law_id=f"hc_scan.{spec.kind}",
        residual_max=worst,
        threshold=bound,
        witness={
            "operator": spec.to_dict() if spec.kind != "filtered" or spec.filter.kind != "custom" else spec.label,
            "worst_member": worst_i,
            "ratios": [r for r in ratios],
            "skipped_zero_members": skipped,
            "sup_grid": list(SUP_GRID_SHAPE),
            "constant_ratio": math.sqrt(surface_area(rule.dim_d)),
        },
        samples=len(kept),
        rule=rule.describe(),
    )
