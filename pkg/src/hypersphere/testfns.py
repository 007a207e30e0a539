"""Deterministic test functions on S^2 and the default corpus."""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .operators import CoefficientVector, SampledFunction, node_values
from .quadrature import QuadratureRule
from .sphere_basis import SpherePoint, harmonic_matrix

SMOOTHNESS_TAGS = ("polynomial", "smooth", "C0", "noisy")

NAMED_FUNCTIONS = ("const1", "cosine_cap", "franke_sphere", "zonal_abs", "vanishing", "gaussian_bump", "exp_linear")

CAP_CENTER = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)
CAP_RADIUS = 0.5


@dataclass(frozen=True, eq=False)
class TestFunction:
    """A named function on S^2, vectorized over (M, 3) point arrays."""

    __test__ = False  # not a pytest class

    name: str
    handle: Callable[[np.ndarray], np.ndarray]
    smoothness_tag: str
    seed: int = 0

    def __post_init__(self):
        if self.smoothness_tag not in SMOOTHNESS_TAGS:
            raise ValueError(f"unknown smoothness tag {self.smoothness_tag!r}")

    def __call__(self, x):
        if isinstance(x, SpherePoint):
            return float(np.asarray(self.handle(x.as_array()[None, :]), dtype=float)[0])
        pts = np.asarray(x, dtype=float)
        if pts.ndim == 1:
            return float(np.asarray(self.handle(pts[None, :]), dtype=float)[0])
        out = np.asarray(self.handle(pts), dtype=float)
        if out.shape == ():
            out = np.full(pts.shape[0], float(out))
        return out


def random_polynomial(n: int, seed: int) -> tuple[CoefficientVector, TestFunction]:
    """Polynomial of degree <= n with i.i.d. U[-1, 1] coefficients."""
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")
    rng = np.random.default_rng(seed)
    coeffs = CoefficientVector(n, rng.uniform(-1.0, 1.0, (n + 1) ** 2))
    values = coeffs.values

    def handle(x):
        return harmonic_matrix(n, x) @ values

    return coeffs, TestFunction(f"poly{n}", handle, "polynomial", seed)


def _const1(x):
    return np.ones(x.shape[0])


def _zonal_abs(x):
    return np.abs(x[:, 2])


def _cosine_cap(x):
    r = np.arccos(np.clip(x @ CAP_CENTER, -1.0, 1.0))
    return np.where(r < CAP_RADIUS, np.cos(0.5 * np.pi * r / CAP_RADIUS), 0.0)


def _franke_sphere(x):
    # Franke's test function carried over to the sphere (9x, 9y, 9z).
    u, v, w = 9.0 * x[:, 0], 9.0 * x[:, 1], 9.0 * x[:, 2]
    return (
        0.75 * np.exp(-((u - 2) ** 2 + (v - 2) ** 2 + (w - 2) ** 2) / 4.0)
        + 0.75 * np.exp(-((u + 1) ** 2) / 49.0 - (v + 1) / 10.0 - (w + 1) / 10.0)
        + 0.5 * np.exp(-((u - 7) ** 2 + (v - 3) ** 2 + (w - 5) ** 2) / 4.0)
        - 0.2 * np.exp(-((u - 4) ** 2) - (v - 7) ** 2 - (w - 5) ** 2)
    )


def _gaussian_bump(x):
    center = np.array([0.0, 0.6, 0.8])
    return np.exp(-4.0 * np.sum((x - center) ** 2, axis=1))


def _exp_linear(x):
    return np.exp(0.5 * x[:, 0] - 0.3 * x[:, 1] + 0.2 * x[:, 2])


_CATALOGUE = {
    "const1": (_const1, "smooth"),
    "cosine_cap": (_cosine_cap, "C0"),
    "franke_sphere": (_franke_sphere, "smooth"),
    "zonal_abs": (_zonal_abs, "C0"),
    "gaussian_bump": (_gaussian_bump, "smooth"),
    "exp_linear": (_exp_linear, "smooth"),
}


def named_function(name: str, degree: int = 2) -> TestFunction:
    """Look up a catalogued function.

    ``cosine_cap`` is cos(pi r / (2 R)) inside the geodesic cap of radius
    R = 0.5 about (1, 1, 1)/sqrt(3) and 0 outside; ``vanishing`` is the
    node-vanishing witness for ``build_rule(degree)``.
    """
    if name == "vanishing":
        from .algebra import vanishing_witness
        from .quadrature import build_rule

        witness = vanishing_witness(degree, build_rule(degree))
        return TestFunction(f"vanishing{degree}", witness.func, "polynomial")
    try:
        handle, tag = _CATALOGUE[name]
    except KeyError:
        raise ValueError(f"unknown test function {name!r}; known: {', '.join(NAMED_FUNCTIONS)}") from None
    return TestFunction(name, handle, tag)


def add_noise(f, sigma: float, rule: QuadratureRule, seed: int) -> SampledFunction:
    """Node-aligned f(x_j) + sigma * g_j with seeded standard normal g_j."""
    if sigma < 0:
        raise ValueError(f"noise level must be nonnegative, got {sigma}")
    clean = node_values(f, rule)
    noise = np.random.default_rng(seed).standard_normal(rule.size)
    name = getattr(f, "name", "f")
    return SampledFunction.on_rule(clean + sigma * noise, rule, name=f"{name}+noise{sigma:g}")


def default_corpus(rule: QuadratureRule, seed: int = 0) -> list:
    """The 20-member corpus: 8 polynomials, 4 smooth, 2 C0, 6 noisy.

    Noisy members are node-aligned to ``rule``; the rest are handles.
    """
    polys = [random_polynomial(deg, seed * 1000 + deg)[1] for deg in range(8)]
    smooth = [named_function(n) for n in ("const1", "franke_sphere", "gaussian_bump", "exp_linear")]
    rough = [named_function(n) for n in ("zonal_abs", "cosine_cap")]
    noisy_inputs = [
        (smooth[1], 0.05),
        (smooth[2], 0.05),
        (rough[0], 0.05),
        (polys[5], 0.1),
        (rough[1], 0.1),
        (smooth[0], 0.1),
    ]
    noisy = [add_noise(f, sigma, rule, seed * 1000 + 500 + i) for i, (f, sigma) in enumerate(noisy_inputs)]
    return polys + smooth + rough + noisy


def corpus_fingerprint(corpus, rule: QuadratureRule) -> str:
    """Hash of node values rounded to 12 significant digits."""
    h = hashlib.sha256(rule.fingerprint.encode())
    for f in corpus:
        vals = node_values(f, rule)
        h.update(",".join(f"{v:.11e}" for v in vals).encode())
    return h.hexdigest()[:16]


def samples_to_csv(f, rule: QuadratureRule) -> str:
    vals = node_values(f, rule)
    buf = io.StringIO()
    buf.write("j,x,y,z,w,value\n")
    for j, ((x, y, z), w, v) in enumerate(zip(rule.nodes, rule.weights, vals)):
        buf.write(f"{j},{x:.17g},{y:.17g},{z:.17g},{w:.17g},{v:.17g}\n")
    return buf.getvalue()


def samples_from_csv(text: str, rule: QuadratureRule, name: str = "samples") -> SampledFunction:
    """Read node-aligned samples; nodes and weights must match ``rule``."""
    rows = list(csv.DictReader(io.StringIO(text)))
    if len(rows) != rule.size:
        raise ValueError(f"sample file has {len(rows)} rows, rule has {rule.size} nodes")
    values = np.empty(rule.size)
    for row in rows:
        j = int(row["j"])
        point = np.array([float(row["x"]), float(row["y"]), float(row["z"])])
        if np.max(np.abs(point - rule.nodes[j])) > 1e-14 or abs(float(row["w"]) - rule.weights[j]) > 1e-14:
            raise ValueError(f"sample row {j} does not match node {j} of the rule")
        values[j] = float(row["value"])
    return SampledFunction.on_rule(values, rule, name=name)
