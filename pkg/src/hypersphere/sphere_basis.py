"""Harmonic-space bookkeeping, real spherical harmonics on S^2, and kernels.

Ordering inside a degree ``ell`` (k is 1-based): k = 1 is the zonal harmonic,
k = 2j carries cos(j phi) and k = 2j + 1 carries sin(j phi), j = 1..ell.
Coefficient vectors are flattened in (ell, k) lexicographic order, so the
flat position of (ell, k) on S^2 is ``ell**2 + k - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .special_functions import (
    MAX_DEGREE,
    DegreeError,
    assoc_legendre_table,
    gegenbauer_C,
    jacobi_P,
)

UNIT_TOL = 1e-12


class UnsupportedDimensionError(ValueError):
    """Pointwise harmonics are only implemented on S^2."""


@dataclass(frozen=True)
class SpherePoint:
    coords: tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if len(coords) < 2:
            raise ValueError("a sphere point needs at least two coordinates")
        norm = math.sqrt(math.fsum(c * c for c in coords))
        if abs(norm - 1.0) > UNIT_TOL:
            raise ValueError(f"point is not on the unit sphere (|x| = {norm!r})")
        object.__setattr__(self, "coords", coords)

    @property
    def dim_d(self) -> int:
        return len(self.coords) - 1

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "SpherePoint":
        """Point on S^2 from colatitude ``theta`` and azimuth ``phi``."""
        st = math.sin(theta)
        return cls((st * math.cos(phi), st * math.sin(phi), math.cos(theta)))

    def as_array(self) -> np.ndarray:
        return np.array(self.coords)


@dataclass(frozen=True, order=True)
class HarmonicIndex:
    ell: int
    k: int

    def __post_init__(self):
        if self.ell < 0 or self.k < 1:
            raise ValueError(f"invalid harmonic index {(self.ell, self.k)}")

    def validate(self, d: int = 2) -> "HarmonicIndex":
        if self.k > harmonic_dimension(d, self.ell):
            raise ValueError(
                f"order index k={self.k} exceeds Z({d}, {self.ell}) = {harmonic_dimension(d, self.ell)}"
            )
        return self

    @property
    def flat(self) -> int:
        return flat_index(self.ell, self.k)


def harmonic_dimension(d: int, ell: int) -> int:
    """Z(d, ell): dimension of the degree-ell harmonics on S^d (exact integer)."""
    if d < 2:
        raise UnsupportedDimensionError(f"sphere dimension must be >= 2, got {d}")
    if ell < 0:
        raise DegreeError(f"degree must be nonnegative, got {ell}")
    if ell > MAX_DEGREE:
        raise DegreeError(f"degree {ell} exceeds cap {MAX_DEGREE}")
    if ell == 0:
        return 1
    num = (2 * ell + d - 1) * math.factorial(ell + d - 2)
    den = math.factorial(d - 1) * math.factorial(ell)
    return num // den


def space_dimension(d: int, n: int) -> int:
    """d_n = dim P_n(S^d) = (2n + d)(n + d - 1)! / (d! n!)."""
    if d < 2:
        raise UnsupportedDimensionError(f"sphere dimension must be >= 2, got {d}")
    if n < 0:
        raise DegreeError(f"degree must be nonnegative, got {n}")
    if n > MAX_DEGREE:
        raise DegreeError(f"degree {n} exceeds cap {MAX_DEGREE}")
    return (2 * n + d) * math.factorial(n + d - 1) // (math.factorial(d) * math.factorial(n))


def surface_area(d: int) -> float:
    """omega_d = 2 pi^((d+1)/2) / Gamma((d+1)/2)."""
    if d < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {d}")
    return 2.0 * math.pi ** ((d + 1) / 2) / math.gamma((d + 1) / 2)


def flat_index(ell: int, k: int) -> int:
    return ell * ell + k - 1


def iter_indices(n: int) -> Iterator[HarmonicIndex]:
    """All S^2 indices with degree <= n, in flat order."""
    for ell in range(n + 1):
        for k in range(1, 2 * ell + 2):
            yield HarmonicIndex(ell, k)


def index_degrees(n: int) -> np.ndarray:
    """Degree ell of every flat position up to degree n (S^2)."""
    return np.repeat(np.arange(n + 1), 2 * np.arange(n + 1) + 1)


def _points_array(x) -> np.ndarray:
    if isinstance(x, SpherePoint):
        if x.dim_d != 2:
            raise UnsupportedDimensionError(
                f"pointwise harmonics are implemented for d = 2 only, got d = {x.dim_d}"
            )
        return x.as_array()[None, :]
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[-1] != 3:
        raise UnsupportedDimensionError(
            f"pointwise harmonics are implemented for d = 2 only, got points in R^{pts.shape[-1]}"
        )
    return pts


def harmonic_matrix(n: int, points) -> np.ndarray:
    """Values of every real harmonic of degree <= n at ``points``.

    Parameters
    ----------
    n : int
        Maximal degree.
    points : array_like of shape (M, 3) or SpherePoint
        Unit vectors in R^3.

    Returns
    -------
    ndarray of shape (M, (n + 1)**2)
        Column ``ell**2 + k - 1`` holds Y_{ell k} at each point.
    """
    pts = _points_array(points)
    x, y, z = pts[:, 0], pts[:, 1], np.clip(pts[:, 2], -1.0, 1.0)
    phi = np.arctan2(y, x)
    plm = assoc_legendre_table(n, z)
    out = np.empty((pts.shape[0], (n + 1) ** 2))
    root2 = math.sqrt(2.0)
    cos_m = [np.cos(m * phi) for m in range(n + 1)]
    sin_m = [np.sin(m * phi) for m in range(n + 1)]
    for ell in range(n + 1):
        base = ell * ell
        out[:, base] = plm[ell, 0]
        for m in range(1, ell + 1):
            out[:, base + 2 * m - 1] = root2 * plm[ell, m] * cos_m[m]
            out[:, base + 2 * m] = root2 * plm[ell, m] * sin_m[m]
    return out


def eval_harmonic(index: HarmonicIndex | tuple[int, int], x) -> float | np.ndarray:
    """Y_{ell k}(x) on S^2; scalar for a single point."""
    if not isinstance(index, HarmonicIndex):
        index = HarmonicIndex(*index)
    index.validate(2)
    pts = _points_array(x)
    vals = harmonic_matrix(index.ell, pts)[:, index.flat]
    single = isinstance(x, SpherePoint) or np.ndim(x) == 1
    return float(vals[0]) if single else vals


def kernel_G(ell: int, d: int, t):
    """Reproducing kernel of H_ell(S^d) as a function of t = x . y.

    G_ell(t) = (2 ell + d - 1) / ((d - 1) omega_d) * C_ell^((d-1)/2)(t)
    """
    if d < 2:
        raise UnsupportedDimensionError(f"sphere dimension must be >= 2, got {d}")
    scale = (2 * ell + d - 1) / ((d - 1) * surface_area(d))
    c = gegenbauer_C(ell, (d - 1) / 2, t)
    return scale * c


def kernel_E(n: int, d: int, t):
    """Reproducing kernel of P_n(S^d) via its closed Jacobi form.

    E_n(t) = (1/omega_d) * (d)_n / (d/2)_n * P_n^(d/2, (d-2)/2)(t), which equals
    the partial sum of ``kernel_G`` over ell = 0..n.
    """
    if d < 2:
        raise UnsupportedDimensionError(f"sphere dimension must be >= 2, got {d}")
    # (d)_n / (d/2)_n as a running product of ratios; each factor overflows alone.
    ratio = math.prod((d + i) / (d / 2 + i) for i in range(n))
    scale = ratio / surface_area(d)
    return scale * jacobi_P(n, d / 2, (d - 2) / 2, t)
