"""Positive-weight quadrature on S^2 and its certification.

The rules are tensor products of Gauss-Legendre in t = cos(theta) with an
equiangular azimuthal grid. Node sums use fixed node order and compensated
accumulation so that every downstream residual is reproducible bit for bit.
"""

from __future__ import annotations

import hashlib
import json
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .reports import CheckReport, tol
from .special_functions import gauss_legendre
from .sphere_basis import UnsupportedDimensionError, harmonic_matrix, surface_area

CERTIFY_TOL = 1e-9
WEIGHT_SUM_TOL = 1e-10
UNIT_TOL = 1e-12


class NodeEvaluationError(ValueError):
    """A function returned a non-finite value at a quadrature node."""


def compensated_sum(terms) -> np.ndarray | float:
    """Sum ``terms`` along axis 0 in index order with Neumaier compensation.

    1-D input is summed with :func:`math.fsum` (correctly rounded). For
    higher-rank input the loop runs over the leading axis and the remaining
    axes are vectorized, so the order of accumulation is fixed.
    """
    terms = np.asarray(terms, dtype=float)
    if terms.ndim == 1:
        return math.fsum(terms)
    s = np.zeros(terms.shape[1:])
    c = np.zeros(terms.shape[1:])
    for row in terms:
        t = s + row
        big = np.abs(s) >= np.abs(row)
        c += np.where(big, (s - t) + row, (row - t) + s)
        s = t
    return s + c


def weighted_node_sum(weights: np.ndarray, values: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Compensated sum_j w_j v_{f j} B_{j i} for a batch of value rows.

    Parameters
    ----------
    weights : (N,) array
    values : (F, N) array of node values, one row per function
    basis : (N, D) array of basis values at the nodes

    Returns
    -------
    (F, D) array
    """
    wv = values * weights[None, :]
    s = np.zeros((values.shape[0], basis.shape[1]))
    c = np.zeros_like(s)
    for j in range(basis.shape[0]):
        row = wv[:, j, None] * basis[None, j, :]
        t = s + row
        big = np.abs(s) >= np.abs(row)
        c += np.where(big, (s - t) + row, (row - t) + s)
        s = t
    return s + c


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes on S^2 with positive weights and a certified exactness degree.

    ``polar_nodes`` is set only for rules with known Gauss-Legendre x
    equiangular structure (as produced by :func:`build_rule`).
    """

    nodes: np.ndarray
    weights: np.ndarray
    exactness: int
    dim_d: int = 2
    polar_nodes: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != self.dim_d + 1:
            raise ValueError(f"nodes must have shape (N, {self.dim_d + 1}), got {nodes.shape}")
        if weights.shape != (nodes.shape[0],):
            raise ValueError("need exactly one weight per node")
        if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise ValueError("quadrature weights must be positive and finite")
        if np.max(np.abs(np.linalg.norm(nodes, axis=1) - 1.0)) > UNIT_TOL:
            raise ValueError("all quadrature nodes must lie on the unit sphere")
        if int(self.exactness) != self.exactness or self.exactness < 0:
            raise ValueError(f"exactness must be a nonnegative integer, got {self.exactness}")
        if abs(math.fsum(weights) - surface_area(self.dim_d)) > WEIGHT_SUM_TOL:
            raise ValueError(
                f"weights sum to {math.fsum(weights)!r}, expected surface area {surface_area(self.dim_d)!r}"
            )
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "exactness", int(self.exactness))
        if self.polar_nodes is not None:
            polar = np.array(self.polar_nodes, dtype=float)
            polar.setflags(write=False)
            object.__setattr__(self, "polar_nodes", polar)

    @property
    def size(self) -> int:
        return int(self.weights.size)

    @property
    def design_degree(self) -> int:
        """Largest n with exactness >= 2n."""
        return self.exactness // 2

    @property
    def fingerprint(self) -> str:
        fp = self._cache.get("fingerprint")
        if fp is None:
            h = hashlib.sha256()
            h.update(np.ascontiguousarray(self.nodes).tobytes())
            h.update(np.ascontiguousarray(self.weights).tobytes())
            h.update(str(self.exactness).encode())
            fp = h.hexdigest()[:16]
            self._cache["fingerprint"] = fp
        return fp

    def basis(self, n: int) -> np.ndarray:
        """Harmonics of degree <= n at the nodes, shape (N, (n + 1)**2); cached."""
        if self.dim_d != 2:
            raise UnsupportedDimensionError("basis evaluation is implemented for d = 2 only")
        with self._lock:
            full = self._cache.get("basis")
            if full is None or full[0] < n:
                mat = harmonic_matrix(n, self.nodes)
                mat.setflags(write=False)
                full = (n, mat)
                self._cache["basis"] = full
        return full[1][:, : (n + 1) ** 2]

    def describe(self) -> dict:
        return {"n": self.design_degree, "exactness": self.exactness}

    def to_json(self) -> str:
        """Serialize as ``{"d", "exactness", "nodes", "weights"}`` with 17 significant digits."""
        fmt = "{:.17g}".format
        node_rows = ",\n    ".join("[" + ", ".join(fmt(v) for v in row) + "]" for row in self.nodes)
        weight_rows = ",\n    ".join(fmt(w) for w in self.weights)
        return (
            "{\n"
            f'  "d": {self.dim_d},\n'
            f'  "exactness": {self.exactness},\n'
            f'  "nodes": [\n    {node_rows}\n  ],\n'
            f'  "weights": [\n    {weight_rows}\n  ]\n'
            "}\n"
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def from_json(cls, text: str) -> "QuadratureRule":
        data = json.loads(text)
        try:
            rule = cls(
                nodes=np.array(data["nodes"], dtype=float),
                weights=np.array(data["weights"], dtype=float),
                exactness=int(data["exactness"]),
                dim_d=int(data["d"]),
            )
        except KeyError as exc:
            raise ValueError(f"rule file is missing field {exc}") from None
        # Recover the polar structure when the file is a saved build_rule output.
        if rule.dim_d == 2 and rule.exactness % 2 == 1:
            candidate = build_rule(rule.exactness // 2)
            if candidate.fingerprint == rule.fingerprint:
                return candidate
        return rule

    @classmethod
    def load(cls, path: str | Path) -> "QuadratureRule":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def build_rule(n: int) -> QuadratureRule:
    """Rule on S^2 with exactness 2n + 1 (so at least 2n).

    (n + 1)-point Gauss-Legendre in t = cos(theta) times 2n + 2 equally spaced
    azimuths; N = (n + 1)(2n + 2) and every weight is (2 pi / (2n + 2)) w_GL.
    Nodes are ordered by ascending t, then by azimuth.
    """
    if int(n) != n or n < 0:
        raise ValueError(f"rule degree must be a nonnegative integer, got {n!r}")
    n = int(n)
    gl = gauss_legendre(n + 1)
    n_phi = 2 * n + 2
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    t = np.repeat(gl.nodes, n_phi)
    ph = np.tile(phi, n + 1)
    st = np.sqrt(1.0 - t * t)
    nodes = np.column_stack([st * np.cos(ph), st * np.sin(ph), t])
    weights = np.repeat(gl.weights * (2.0 * np.pi / n_phi), n_phi)
    return QuadratureRule(nodes=nodes, weights=weights, exactness=2 * n + 1, polar_nodes=gl.nodes)


def verify_exactness(rule: QuadratureRule, degree: int) -> CheckReport:
    """Integrate every harmonic of degree <= ``degree`` and compare with the exact value.

    The exact integral of Y_{ell k} is sqrt(omega_2) for (0, 1) and 0 otherwise.
    """
    if rule.dim_d != 2:
        raise UnsupportedDimensionError("exactness certification needs S^2 harmonics")
    if degree < 0:
        raise ValueError(f"degree must be nonnegative, got {degree}")
    basis = harmonic_matrix(degree, rule.nodes)
    sums = weighted_node_sum(rule.weights, np.ones((1, rule.size)), basis)[0]
    sums[0] -= math.sqrt(surface_area(2))
    err = np.abs(sums)
    worst = int(np.argmax(err))
    ell = int(math.isqrt(worst))
    return CheckReport(
        law_id=f"quadrature.exactness.degree{degree}",
        residual_max=float(err[worst]),
        threshold=tol(CERTIFY_TOL),
        witness={"ell": ell, "k": worst - ell * ell + 1, "nodes": rule.size},
        samples=int(err.size),
        rule=rule.describe(),
    )


def integrate(rule: QuadratureRule, f) -> float:
    """sum_j w_j f(x_j) over the rule's nodes in fixed order.

    ``f`` is evaluated on the (N, 3) node array in one call.
    """
    values = np.asarray(f(rule.nodes), dtype=float)
    if values.shape == ():
        values = np.full(rule.size, float(values))
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        j = int(bad[0])
        raise NodeEvaluationError(f"non-finite value {values[j]!r} at node {j} {tuple(rule.nodes[j])}")
    return compensated_sum(rule.weights * values)
