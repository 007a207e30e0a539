"""Check reports shared by the quadrature certifier and the law checks."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np

TOL_SCALE_ENV = "HYPERSPHERE_TOL_SCALE"


def tol(value: float) -> float:
    """Scale a threshold by ``$HYPERSPHERE_TOL_SCALE`` (default 1)."""
    raw = os.environ.get(TOL_SCALE_ENV, "").strip()
    if not raw:
        return value
    try:
        scale = float(raw)
    except ValueError as exc:
        raise ValueError(f"{TOL_SCALE_ENV} must be a positive number, got {raw!r}") from exc
    if not scale > 0:
        raise ValueError(f"{TOL_SCALE_ENV} must be a positive number, got {raw!r}")
    return value * scale


def jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays and tuples into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return obj


@dataclass
class CheckReport:
    """Outcome of one numerical law check.

    ``passed`` is derived, never set by hand: for ordinary laws it means
    ``residual_max <= threshold``; for ``expect_violation`` laws it means the
    violation was observed, ``residual_max > threshold``.
    """

    law_id: str
    residual_max: float
    threshold: float
    expect_violation: bool = False
    witness: dict = field(default_factory=dict)
    samples: int = 0
    seed: int = 0
    rule: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.residual_max):
            return False
        if self.expect_violation:
            return self.residual_max > self.threshold
        return self.residual_max <= self.threshold

    def to_dict(self) -> dict:
        return jsonable(
            {
                "law_id": self.law_id,
                "pass": self.passed,
                "expect_violation": self.expect_violation,
                "residual_max": self.residual_max,
                "threshold": self.threshold,
                "witness": self.witness,
                "seed": self.seed,
                "samples": self.samples,
                "rule": self.rule,
            }
        )

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        rel = ">" if self.expect_violation else "<="
        return f"{status} {self.law_id}: residual {self.residual_max:.3e} (want {rel} {self.threshold:.1e})"
