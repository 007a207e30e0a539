"""Orthogonal polynomials and Gauss-Legendre rules.

Every evaluator runs a three-term recurrence in float64 and accepts either a
scalar or an ndarray for ``x`` (scalars come back as Python floats).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_DEGREE = 200

_NEWTON_MAX_ITER = 100
_NEWTON_STEP_TOL = 1e-15


class DegreeError(ValueError):
    """Raised when a degree is negative or above ``MAX_DEGREE``."""


class QuadratureConstructionError(RuntimeError):
    """Raised when Newton iteration for Gauss-Legendre nodes does not converge."""


def _check_degree(n: int, name: str = "degree") -> int:
    if int(n) != n or n < 0:
        raise DegreeError(f"{name} must be a nonnegative integer, got {n!r}")
    if n > MAX_DEGREE:
        raise DegreeError(f"{name}={n} exceeds the supported cap {MAX_DEGREE}")
    return int(n)


def _out(value, scalar: bool):
    return float(value) if scalar else value


def legendre_P(ell: int, x):
    """Legendre polynomial P_ell(x)."""
    ell = _check_degree(ell)
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if ell == 0:
        return _out(p_prev, scalar)
    p = x.copy()
    for k in range(1, ell):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return _out(p, scalar)


def legendre_all(n: int, x) -> np.ndarray:
    """Rows P_0(x), ..., P_n(x); shape ``(n + 1,) + x.shape``."""
    n = _check_degree(n)
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = x
    for k in range(1, n):
        out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1)
    return out


def assoc_legendre_table(n: int, x) -> np.ndarray:
    """Fully normalized associated Legendre values for all 0 <= m <= ell <= n.

    Returns an array ``p`` of shape ``(n + 1, n + 1) + x.shape`` with
    ``p[ell, m]`` holding

        sqrt((2 ell + 1) / (4 pi) * (ell - m)! / (ell + m)!) * P_ell^m(x)

    without the Condon-Shortley phase, and zeros for ``m > ell``. The diagonal
    is seeded from sqrt(1/(4 pi)) and the table is filled by the standard
    upward recurrence in ``ell`` at fixed ``m``, which stays stable for the
    degrees used here.
    """
    n = _check_degree(n)
    x = np.asarray(x, dtype=float)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    p = np.zeros((n + 1, n + 1) + x.shape)
    p[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    for m in range(1, n + 1):
        p[m, m] = math.sqrt((2 * m + 1) / (2 * m)) * s * p[m - 1, m - 1]
    for m in range(0, n):
        p[m + 1, m] = math.sqrt(2 * m + 3) * x * p[m, m]
        for ell in range(m + 2, n + 1):
            a = math.sqrt((4 * ell * ell - 1) / (ell * ell - m * m))
            b = math.sqrt(((ell - 1) ** 2 - m * m) / (4 * (ell - 1) ** 2 - 1))
            p[ell, m] = a * (x * p[ell - 1, m] - b * p[ell - 2, m])
    return p


def assoc_legendre_normalized(ell: int, m: int, x):
    """Single entry of :func:`assoc_legendre_table`."""
    ell = _check_degree(ell)
    if int(m) != m or not 0 <= m <= ell:
        raise ValueError(f"order m must satisfy 0 <= m <= ell, got m={m}, ell={ell}")
    scalar = np.ndim(x) == 0
    return _out(assoc_legendre_table(ell, x)[ell, int(m)], scalar)


def gegenbauer_C(ell: int, alpha: float, x):
    """Gegenbauer polynomial C_ell^alpha(x) for alpha > 0."""
    ell = _check_degree(ell)
    if not alpha > 0:
        raise ValueError(f"Gegenbauer index must be positive, got {alpha}")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    c_prev = np.ones_like(x)
    if ell == 0:
        return _out(c_prev, scalar)
    c = 2.0 * alpha * x
    for k in range(1, ell):
        c_prev, c = c, (2.0 * (k + alpha) * x * c - (k + 2.0 * alpha - 1.0) * c_prev) / (k + 1)
    return _out(c, scalar)


def jacobi_P(n: int, alpha: float, beta: float, x):
    """Jacobi polynomial P_n^(alpha, beta)(x) for alpha, beta > -1."""
    n = _check_degree(n)
    if not (alpha > -1 and beta > -1):
        raise ValueError(f"Jacobi indices must exceed -1, got ({alpha}, {beta})")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return _out(p_prev, scalar)
    ab = alpha + beta
    p = 0.5 * (alpha - beta) + 0.5 * (ab + 2.0) * x
    for k in range(2, n + 1):
        c = 2.0 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        a2 = (c - 1.0) * (alpha * alpha - beta * beta)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c
        p_prev, p = p, ((a2 + a3 * x) * p - a4 * p_prev) / a1
    return _out(p, scalar)


def pochhammer(a: float, ell: int) -> float:
    """Rising factorial (a)_ell; (a)_0 = 1."""
    if int(ell) != ell or ell < 0:
        raise ValueError(f"Pochhammer length must be a nonnegative integer, got {ell!r}")
    out = 1.0
    for i in range(int(ell)):
        out *= a + i
    return out


@dataclass(frozen=True)
class Quadrature1D:
    """Gauss-Legendre rule on [-1, 1]; nodes ascending, weights positive."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1 or nodes.size == 0:
            raise ValueError("nodes and weights must be nonempty 1-D arrays of equal length")
        if np.any(np.diff(nodes) <= 0) or np.any(np.abs(nodes) >= 1):
            raise ValueError("nodes must be strictly increasing inside (-1, 1)")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def count(self) -> int:
        return int(self.nodes.size)

    def integrate(self, f) -> float:
        return math.fsum(self.weights * np.asarray(f(self.nodes), dtype=float))


def _legendre_and_derivative(m: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(1, m):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    dp = m * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def gauss_legendre(m: int) -> Quadrature1D:
    """m-point Gauss-Legendre rule, exact for polynomials of degree <= 2m - 1.

    Roots of P_m are found by Newton's method started from the Chebyshev-angle
    guesses cos(pi (i - 1/4) / (m + 1/2)). Only the nonnegative half is
    iterated; the other half is mirrored so the rule is exactly symmetric.
    """
    if int(m) != m or m < 1:
        raise ValueError(f"number of Gauss-Legendre points must be positive, got {m!r}")
    m = int(m)
    _check_degree(m, "number of points")
    half = (m + 1) // 2
    i = np.arange(1, half + 1)
    x = np.cos(np.pi * (i - 0.25) / (m + 0.5))
    for _ in range(_NEWTON_MAX_ITER):
        p, dp = _legendre_and_derivative(m, x)
        step = p / dp
        x = x - step
        if np.max(np.abs(step)) <= _NEWTON_STEP_TOL:
            break
    else:
        raise QuadratureConstructionError(
            f"Newton iteration for {m}-point Gauss-Legendre did not converge "
            f"in {_NEWTON_MAX_ITER} steps (last step {np.max(np.abs(step)):.3e})"
        )
    if m % 2 == 1:
        x[-1] = 0.0
    _, dp = _legendre_and_derivative(m, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    # x is descending and positive; mirror into an ascending full set.
    if m % 2 == 1:
        nodes = np.concatenate([-x, x[-2::-1]])
        weights = np.concatenate([w, w[-2::-1]])
    else:
        nodes = np.concatenate([-x, x[::-1]])
        weights = np.concatenate([w, w[::-1]])
    return Quadrature1D(nodes + 0.0, weights)
