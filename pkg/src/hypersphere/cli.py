"""Command-line interface: ``hypersphere rule|approx|verify|table``.

Exit codes: 0 success, 2 law mismatch, 3 configuration error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

import numpy as np

from . import algebra as alg
from .operators import (
    Filter,
    OperatorSpec,
    analyze_values,
    hc_membership_scan,
    inner_rows,
    node_values,
    synthesize_values,
)
from .quadrature import QuadratureRule, build_rule, verify_exactness
from .reports import CheckReport, jsonable
from .svgplot import line_chart
from .testfns import (
    NAMED_FUNCTIONS,
    add_noise,
    corpus_fingerprint,
    default_corpus,
    named_function,
    random_polynomial,
    samples_from_csv,
)

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_CONFIG = 3
EXIT_IO = 4

THREADS_ENV = "HYPERSPHERE_THREADS"

DEFAULT_NS = (3, 6, 10)
DEFAULT_LAMBDAS = (0.05, 0.2, 1.0)
PAIRS = ((3, 6), (4, 10))
IDEAL_PAIRS = ((7, 4), (3, 6), (5, 5))
MINIMALITY_KS = (1, 2, 4)
HOMOMORPHISM_DEGREES = (2, 5, 8)
VANISHING_NS = (0, 2, 5)
REFERENCE_EXTRA = 20

# Short law names accepted by --law, mapped to law families.
LAW_ALIASES = {
    "quadrature": "quadrature",
    "projection": "projection",
    "self_adjoint": "self_adjoint",
    "idempotent": "idempotent",
    "pythagorean": "semigroup",
    "semigroup": "semigroup",
    "norm_bound": "norm_bound",
    "norm_one": "norm_one",
    "best_approximation": "best_approximation",
    "commutation": "commutation",
    "product": "product",
    "sum": "sum",
    "difference": "difference",
    "ideal": "ideal",
    "minimality": "minimality",
    "homomorphism": "homomorphism",
    "nonnegative": "nonnegative",
    "zero_operator": "zero_operator",
    "quadratic_form": "quadratic_form",
    "vanishing": "vanishing",
    "kernel_bound": "kernel_bound",
    "hc": "hc",
    "lemma3.1": "best_approximation",
    "prop3.10": "norm_bound",
    "thm3.6": "commutation",
    "thm4.1": "product",
    "thm4.2": "sum",
    "thm4.3": "difference",
    "thm5.1": "ideal",
    "thm5.2": "homomorphism",
    "remark3.1": "vanishing",
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: list[int] | None = None
    m: int | None = None
    lambdas: list[float] | None = None
    filter: str = "h1"
    op: list | None = None
    corpus: str = "default"
    noise: float = 0.0
    seed: int = 0
    out: str | None = None
    svg: str | None = None
    format: str = "csv"
    law: str = "all"
    rule: str | None = None
    verify: str | None = None
    degree: int | None = None

    def to_dict(self) -> dict:
        return jsonable(asdict(self))


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------


def parse_int_list(text: str) -> list[int]:
    """'4', '2,5,8' or '2..20' (inclusive range)."""
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out or any(v < 0 for v in out):
        raise ConfigError(f"expected nonnegative integers, got {text!r}")
    return out


def parse_float_list(text: str) -> list[float]:
    vals = [float(p) for p in str(text).split(",") if p.strip()]
    if not vals or any(not v > 0 for v in vals):
        raise ConfigError(f"expected positive numbers, got {text!r}")
    return vals


def _filter(kind: str) -> Filter:
    if kind == "h1":
        return Filter.h1()
    if kind == "h2":
        return Filter.h2()
    raise ConfigError(f"--filter must be h1 or h2, got {kind!r}")


def make_spec(op, n: int, lam: float | None, filter_kind: str) -> OperatorSpec:
    """Build a spec from a kind name, a JSON object/string, or a JSON file path.

    A kind name takes its parameters from the flags; generalized weights
    default to the filter's h(ell / n) and partial_sum to the band [0, n].
    """
    if isinstance(op, dict):
        data = dict(op)
    else:
        text = str(op).strip()
        if text.startswith("{"):
            data = json.loads(text)
        elif Path(text).is_file():
            data = json.loads(Path(text).read_text(encoding="utf-8"))
        else:
            data = {"kind": text}
    data["n"] = n
    kind = data.get("kind")
    if kind in ("lasso", "hard") and "lambda" not in data:
        if lam is None:
            raise ConfigError(f"{kind} needs --lambda")
        data["lambda"] = lam
    if kind == "filtered" and "filter" not in data:
        data["filter"] = {"kind": filter_kind}
    if kind == "generalized" and "a" not in data:
        h = _filter(filter_kind)
        data["a"] = [1.0] if n == 0 else [float(v) for v in h(np.arange(n + 1) / n)]
    if kind == "partial_sum" and "band" not in data:
        data["band"] = [0, n]
    try:
        return OperatorSpec.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def version_string() -> str:
    """Package version, extended with ``git describe`` output when available."""
    try:
        from importlib.metadata import version

        base = version("artifact")
    except Exception:
        base = "0+unknown"
    try:
        desc = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if desc.returncode == 0 and desc.stdout.strip():
            return f"{base}+g{desc.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return base


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def load_corpus(name: str, rule: QuadratureRule, seed: int) -> list:
    if name == "default":
        return default_corpus(rule, seed)
    path = Path(name)
    if path.is_file():
        return [samples_from_csv(path.read_text(encoding="utf-8"), rule, name=path.stem)]
    return [resolve_function(name, seed)]


def resolve_function(name: str, seed: int):
    if name.startswith("poly") and name[4:].isdigit():
        return random_polynomial(int(name[4:]), seed)[1]
    if name.startswith("vanishing") and name[9:].isdigit():
        return named_function("vanishing", int(name[9:]))
    if name in NAMED_FUNCTIONS:
        return named_function(name)
    raise ConfigError(f"unknown function {name!r}; use default, a samples CSV, poly<k>, or one of {NAMED_FUNCTIONS}")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# rule
# ---------------------------------------------------------------------------


def cmd_rule(cfg: RunConfig) -> int:
    if cfg.verify:
        rule = QuadratureRule.load(cfg.verify)
        degree = cfg.degree if cfg.degree is not None else rule.exactness
    else:
        if not cfg.n or len(cfg.n) != 1:
            raise ConfigError("rule needs a single --n")
        rule = build_rule(cfg.n[0])
        degree = cfg.degree if cfg.degree is not None else 2 * cfg.n[0]
        if cfg.out:
            rule.save(cfg.out)
    report = verify_exactness(rule, degree)
    print(f"N={rule.size} exactness={rule.exactness} weight_sum={math.fsum(rule.weights):.17g} "
          f"fingerprint={rule.fingerprint}")
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# approx and table
# ---------------------------------------------------------------------------


def approximation_row(spec: OperatorSpec, f, n: int, noise: float, seed: int) -> dict:
    """Errors of ``spec`` applied on build_rule(n).

    L2_error compares with the analysis at degree n + 20 on a rule of
    exactness 2(n + 20) + 1 (of the clean function); l2w_error is the
    discrete error against the (possibly noisy) samples.
    """
    rule = build_rule(n)
    clean = node_values(f, rule)
    data = add_noise(f, noise, rule, seed).values if noise > 0 else clean
    coeffs = spec.apply_values(data[None, :], rule)[0]
    resid = data - synthesize_values(coeffs[None, :], rule)[0]
    l2w = math.sqrt(max(float(inner_rows(resid[None, :], resid[None, :], rule)[0]), 0.0))
    if callable(f) and not getattr(f, "node_aligned", False):
        deg = n + REFERENCE_EXTRA
        ref_rule = build_rule(deg)
        ref = analyze_values(node_values(f, ref_rule)[None, :], deg, ref_rule)[0]
        padded = np.zeros_like(ref)
        padded[: coeffs.size] = coeffs
        l2 = math.sqrt(math.fsum((padded - ref) ** 2))
    else:
        l2 = math.nan
    return {
        "function": getattr(f, "name", "f"),
        "n": n,
        "operator": spec.kind,
        "lambda": spec.lam if spec.lam is not None else "",
        "L2_error": l2,
        "l2w_error": l2w,
        "sparsity": int(np.count_nonzero(coeffs == 0.0)),
    }


def _functions(cfg: RunConfig) -> list:
    if cfg.corpus == "default":
        names = ["const1", "franke_sphere", "gaussian_bump", "exp_linear", "zonal_abs", "cosine_cap"]
        return [named_function(nm) for nm in names]
    if Path(cfg.corpus).is_file():
        raise ConfigError("approx and table need a function name; sample files carry no off-node values")
    return [resolve_function(cfg.corpus, cfg.seed)]


def _rows_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def cmd_approx(cfg: RunConfig) -> int:
    ns = cfg.n or [10]
    ops = cfg.op or ["hyper"]
    lams = cfg.lambdas or [None]
    rows = []
    for f in _functions(cfg):
        for n in ns:
            for op in ops:
                for lam in lams:
                    spec = make_spec(op, n, lam, cfg.filter)
                    rows.append(approximation_row(spec, f, n, cfg.noise, cfg.seed))
                    if spec.kind not in ("lasso", "hard"):
                        break
    columns = ["function", "n", "operator", "lambda", "L2_error", "l2w_error", "sparsity"]
    if cfg.format == "json":
        text = json.dumps({"run": run_header(cfg), "rows": jsonable(rows)}, indent=2, sort_keys=True) + "\n"
    else:
        text = _rows_csv(rows, columns)
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_table(cfg: RunConfig) -> int:
    ns = cfg.n or list(range(2, 21))
    if not ns:
        raise ConfigError("degree list must be nonempty")
    ops = cfg.op or ["hyper", "filtered"]
    lam = (cfg.lambdas or [0.05])[0]
    funcs = _functions(cfg)
    if len(funcs) != 1:
        funcs = funcs[:1]
    f = funcs[0]
    specs = {op: [make_spec(op, n, lam, cfg.filter) for n in ns] for op in ops}
    labels = {op: specs[op][0].kind + (f"({cfg.filter})" if specs[op][0].kind == "filtered" else "") for op in ops}
    series: dict[str, list[float]] = {}
    for op in ops:
        series[labels[op]] = [approximation_row(s, f, n, cfg.noise, cfg.seed)["L2_error"] for s, n in zip(specs[op], ns)]
    rows = [{"n": n, **{lab: series[lab][i] for lab in series}} for i, n in enumerate(ns)]
    _emit(_rows_csv(rows, ["n", *series]), cfg.out)
    if cfg.svg:
        Path(cfg.svg).write_text(
            line_chart(ns, series, title=f"L2 error, {getattr(f, 'name', 'f')}", y_label="L2 error"),
            encoding="utf-8",
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


@dataclass
class Cell:
    law_id: str
    family: str
    kinds: tuple
    run: Callable[[], CheckReport] = field(repr=False)


def build_suite(cfg: RunConfig, rule: QuadratureRule, corpus: list) -> list[Cell]:
    """Every law cell for the configured degrees and threshold levels."""
    ns = cfg.n or list(DEFAULT_NS)
    lams = cfg.lambdas or list(DEFAULT_LAMBDAS)
    seed = cfg.seed
    h = _filter(cfg.filter)
    S = OperatorSpec
    cells: list[Cell] = []

    def add(law_id, family, kinds, fn):
        cells.append(Cell(law_id, family, tuple(kinds), lambda: fn(law_id)))

    add(f"quadrature_exactness[n={rule.design_degree}]", "quadrature", (),
        lambda lid: _renamed(verify_exactness(rule, 2 * rule.design_degree), lid))

    for n in ns:
        gen = S.generalized(n, [0.5**ell for ell in range(n + 1)])
        filt = S.filtered(n, h)
        add(f"projection[hyper(n={n})]", "projection", ("hyper",),
            lambda lid, n=n: alg.projection_check(S.hyper(n), corpus, rule, seed=seed, law_id=lid))
        add(f"self_adjoint[generalized(n={n})]", "self_adjoint", ("generalized",),
            lambda lid, g=gen: alg.self_adjoint_check(g, corpus, rule, seed=seed, law_id=lid))
        add(f"generalized_commutes_with_hyper[n={n}]", "commutation", ("generalized", "hyper"),
            lambda lid, n=n: alg.generalized_commutation_check(n, corpus, rule, seed=seed, law_id=lid))
        filt_violates = not alg.is_diagonal_projection(filt)
        add(f"idempotent[{filt.label}]", "idempotent", ("filtered",),
            lambda lid, s=filt, v=filt_violates: alg.idempotency_check(s, corpus, rule, seed=seed,
                                                                     expect_violation=v, law_id=lid))
        add(f"pythagorean[hyper(n={n})]", "semigroup", ("hyper",),
            lambda lid, n=n: alg.semigroup_membership(S.hyper(n), corpus, rule, seed=seed, law_id=lid))
        add(f"pythagorean[{filt.label}]", "semigroup", ("filtered",),
            lambda lid, s=filt, v=filt_violates: alg.semigroup_membership(s, corpus, rule, seed=seed,
                                                                        expect_violation=v, law_id=lid))
        add(f"norm_bound[hyper(n={n})]", "norm_bound", ("hyper",),
            lambda lid, n=n: alg.norm_bound_check(S.hyper(n), corpus, rule, seed=seed, law_id=lid))
        add(f"norm_one[n={n}]", "norm_one", ("hyper",),
            lambda lid, n=n: alg.norm_one_check(n, rule, seed=seed, law_id=lid))
        add(f"best_approximation[n={n}]", "best_approximation", ("hyper",),
            lambda lid, n=n: alg.best_approx_check(corpus[min(9, len(corpus) - 1)], n, rule, seed=seed, law_id=lid))
        add(f"nonnegative[{filt.label}]", "nonnegative", ("filtered",),
            lambda lid, s=filt: alg.nonnegativity_check(s, corpus, rule, seed=seed, law_id=lid))
        for lam in lams:
            hard, lasso = S.hard(n, lam), S.lasso(n, lam)
            add(f"pythagorean[{hard.label}]", "semigroup", ("hard",),
                lambda lid, s=hard: alg.semigroup_membership(s, corpus, rule, seed=seed, law_id=lid))
            add(f"pythagorean[{lasso.label}]", "semigroup", ("lasso",),
                lambda lid, s=lasso: alg.semigroup_membership(s, corpus, rule, seed=seed,
                                                            expect_violation=True, law_id=lid))
            add(f"self_adjoint[{hard.label}]", "self_adjoint", ("hard",),
                lambda lid, s=hard: alg.self_adjoint_check(s, corpus, rule, seed=seed,
                                                         expect_violation=True, law_id=lid))
            add(f"self_adjoint[{lasso.label}]", "self_adjoint", ("lasso",),
                lambda lid, s=lasso: alg.self_adjoint_check(s, corpus, rule, seed=seed,
                                                          expect_violation=True, law_id=lid))
            add(f"idempotent[{lasso.label}]", "idempotent", ("lasso",),
                lambda lid, s=lasso: alg.idempotency_check(s, corpus, rule, seed=seed,
                                                         expect_violation=True, law_id=lid))
            add(f"norm_bound[{hard.label}]", "norm_bound", ("hard",),
                lambda lid, s=hard: alg.norm_bound_check(s, corpus, rule, seed=seed, law_id=lid))

    n_top = max(ns)
    lam_mid = lams[len(lams) // 2]
    pairs = PAIRS if cfg.m is None else tuple((n, cfg.m) for n in ns if n < cfg.m)
    for n, m in pairs:
        add(f"product_projection[hyper(n={n}),hyper(n={m})]", "product", ("hyper",),
            lambda lid, n=n, m=m: alg.product_projection_check(
                S.hyper(n), S.hyper(m), corpus, rule, seed=seed, equal_to=S.hyper(n), law_id=lid))
        add(f"product_projection[zonal_pair(l={n})]", "product", ("zonal",),
            lambda lid, n=n: alg.product_projection_check(*alg.zonal_pair(n), corpus, rule, seed=seed, law_id=lid))
        add(f"sum_projection[hyper(n={n}),band({n + 1}-{m})]", "sum", ("hyper", "partial_sum"),
            lambda lid, n=n, m=m: alg.sum_projection_check(
                S.hyper(n), S.partial_sum(m, (n + 1, m)), corpus, rule, seed=seed, equal_to=S.hyper(m), law_id=lid))
        add(f"sum_projection[hyper(n={n}),hyper(n={m})]", "sum", ("hyper",),
            lambda lid, n=n, m=m: alg.sum_projection_check(S.hyper(n), S.hyper(m), corpus, rule, seed=seed, law_id=lid))
        add(f"difference_projection[hyper(n={m})-hyper(n={n})]", "difference", ("hyper",),
            lambda lid, n=n, m=m: alg.difference_projection_check(
                S.hyper(n), S.hyper(m), corpus, rule, seed=seed, equal_to=S.partial_sum(m, (n + 1, m)), law_id=lid))
        add(f"difference_projection[hyper(n={n})-hyper(n={m})]", "difference", ("hyper",),
            lambda lid, n=n, m=m: alg.difference_projection_check(
                S.hyper(m), S.hyper(n), corpus, rule, seed=seed, law_id=lid))

    ideal_pairs = IDEAL_PAIRS if cfg.m is None else tuple((cfg.m, n) for n in ns)
    for m, n in ideal_pairs:
        add(f"ideal_composition[m={m},n={n}]", "ideal", ("hyper", "hard"),
            lambda lid, m=m, n=n: alg.ideal_composition_check(m, n, lams, corpus, rule, seed=seed, law_id=lid))
    top = max(5, max(MINIMALITY_KS) + 1)
    for k in MINIMALITY_KS:
        add(f"minimality_witness[k={k},n={top}]", "minimality", ("hyper", "hard"),
            lambda lid, k=k: alg.minimality_witness(k, top, lam_mid, corpus, rule, seed=seed, law_id=lid))
    hom_degrees = [d for d in HOMOMORPHISM_DEGREES if d <= n_top] or [n_top]
    add(f"homomorphism[n={n_top}]", "homomorphism", ("hyper", "hard"),
        lambda lid: alg.homomorphism_check(n_top, hom_degrees, lam_mid, corpus, rule, seed=seed, law_id=lid))
    sign_mixed = S.generalized(3, [1.0, -1.0, 0.0, 0.0])
    add(f"nonnegative[generalized(a=1,-1,0,0)]", "nonnegative", ("generalized",),
        lambda lid: alg.nonnegativity_check(sign_mixed, corpus, rule, seed=seed, law_id=lid))
    add(f"zero_operator[hard(n={n_top},lam=1e6)]", "zero_operator", ("hard",),
        lambda lid: alg.zero_operator_check(S.hard(n_top, 1e6), corpus, rule, seed=seed, law_id=lid))
    add(f"quadratic_form_separates[hyper,filtered(n={n_top})]", "quadratic_form", ("hyper", "filtered"),
        lambda lid: alg.quadratic_form_witness(S.hyper(n_top), S.filtered(n_top, h), rule, seed=seed, law_id=lid))
    for n in VANISHING_NS:
        add(f"seminorm_vanishing_witness[n={n}]", "vanishing", (),
            lambda lid, n=n: alg.vanishing_witness_check(n, law_id=lid))
    a_h = [float(v) for v in h(np.arange(n_top + 1) / n_top)]
    add(f"generalized_kernel_integral[n={n_top},filter={h.kind}]", "kernel_bound", ("generalized",),
        lambda lid: alg.kernel_bound_report(n_top, a_h, law_id=lid))
    scan_specs = [S.hyper(n_top), S.lasso(n_top, lam_mid), S.hard(n_top, lam_mid), S.filtered(n_top, h),
                  S.generalized(n_top, a_h)]
    for spec in scan_specs:
        add(f"hc_scan[{spec.label}]", "hc", (spec.kind,),
            lambda lid, s=spec: _renamed(hc_membership_scan(s, corpus, rule), lid))
    for spec in scan_specs[1:3]:
        add(f"hc_dominance[{spec.label}]", "hc", (spec.kind,),
            lambda lid, s=spec: alg.threshold_dominance_check(s, corpus, rule, law_id=lid))
    return cells


def _renamed(report: CheckReport, law_id: str) -> CheckReport:
    report.law_id = law_id
    return report


def select_cells(cells: list[Cell], law: str, op_kinds: list[str] | None) -> list[Cell]:
    if law and law != "all":
        exact = [c for c in cells if c.law_id == law]
        if exact:
            cells = exact
        else:
            family = LAW_ALIASES.get(law.lower())
            if family is None:
                raise ConfigError(f"unknown law {law!r}; use 'all', a law id, or one of {sorted(LAW_ALIASES)}")
            cells = [c for c in cells if c.family == family]
    if op_kinds:
        cells = [c for c in cells if any(k in c.kinds for k in op_kinds)]
    if not cells:
        raise ConfigError("no law matches the selection")
    return cells


def _op_kinds(ops: list | None) -> list[str] | None:
    if not ops:
        return None
    kinds = []
    for op in ops:
        if isinstance(op, dict):
            kinds.append(op.get("kind"))
        else:
            text = str(op).strip()
            if text.startswith("{") or Path(text).is_file():
                data = json.loads(text if text.startswith("{") else Path(text).read_text(encoding="utf-8"))
                kinds.append(data.get("kind"))
            else:
                kinds.append(text)
    return kinds


def run_header(cfg: RunConfig, rule: QuadratureRule | None = None, corpus=None) -> dict:
    header = {
        "config": cfg.to_dict(),
        "version": version_string(),
        "seed": cfg.seed,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    if rule is not None:
        header["rule_fingerprint"] = rule.fingerprint
        header["rule"] = rule.describe()
    if corpus is not None and rule is not None:
        header["corpus_fingerprint"] = corpus_fingerprint(corpus, rule)
    return header


def run_verify(cfg: RunConfig) -> tuple[dict, list[CheckReport]]:
    ns = cfg.n or list(DEFAULT_NS)
    degree = max([*ns, cfg.m or 0, *(m for _, m in PAIRS), *(max(p) for p in IDEAL_PAIRS), 6])
    rule = QuadratureRule.load(cfg.rule) if cfg.rule else build_rule(degree)
    if rule.exactness < 2 * degree:
        raise ConfigError(f"rule exactness {rule.exactness} is below the {2 * degree} the suite needs")
    corpus = load_corpus(cfg.corpus, rule, cfg.seed)
    cells = select_cells(build_suite(cfg, rule, corpus), cfg.law, _op_kinds(cfg.op))
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        results = dict(zip((c.law_id for c in cells), pool.map(lambda c: c.run(), cells)))
    reports = [results[c.law_id] for c in cells]
    return run_header(cfg, rule, corpus), reports


def cmd_verify(cfg: RunConfig) -> int:
    header, reports = run_verify(cfg)
    payload = {"run": header, "reports": [r.to_dict() for r in reports]}
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    for r in reports:
        print(r.summary(), file=sys.stderr if cfg.out is None else sys.stdout)
    if cfg.out is None:
        sys.stdout.write(text)
    failed = [r.law_id for r in reports if not r.passed]
    if failed:
        print(f"{len(failed)} of {len(reports)} laws did not match their expected status:", file=sys.stderr)
        for lid in failed:
            print(f"  {lid}", file=sys.stderr)
        return EXIT_MISMATCH
    print(f"all {len(reports)} laws matched their expected status", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypersphere", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, n_help="degree(s): 4, 2,5,8 or 2..20"):
        p.add_argument("--config", help="JSON file with default values for any flag")
        p.add_argument("--n", help=n_help)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output path (default: stdout)")

    p_rule = sub.add_parser("rule", help="build, save and certify a quadrature rule")
    common(p_rule, n_help="rule degree n (exactness 2n + 1)")
    p_rule.add_argument("--verify", help="re-certify a saved rule JSON")
    p_rule.add_argument("--degree", type=int, help="certification degree (default 2n)")

    for name, helptext in (("approx", "approximation errors per operator"), ("verify", "run the law suite"),
                           ("table", "L2 error versus degree")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--m", type=int, help="second degree for paired laws")
        p.add_argument("--lambda", dest="lambdas", help="threshold level(s), comma separated")
        p.add_argument("--filter", choices=["h1", "h2"])
        p.add_argument("--op", action="append", help="operator kind or spec JSON (file or inline); repeatable")
        p.add_argument("--corpus", help="'default', a function name, or a samples CSV")
        p.add_argument("--function", dest="corpus", help="alias of --corpus")
        p.add_argument("--noise", type=float, help="Gaussian noise level added at the nodes")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--law", help="law id, law family, or 'all'")
        p.add_argument("--rule", help="rule JSON to use instead of building one")
        p.add_argument("--svg", help="also write an SVG chart (table only)")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        try:
            values.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
    for key, val in vars(args).items():
        if key in ("config", "command") or val is None:
            continue
        values[key] = val
    values.pop("command", None)
    if "n" in values and not isinstance(values["n"], list):
        values["n"] = parse_int_list(values["n"])
    if "lambdas" in values and not isinstance(values["lambdas"], list):
        values["lambdas"] = parse_float_list(values["lambdas"])
    if "lambda" in values:
        lam = values.pop("lambda")
        values["lambdas"] = lam if isinstance(lam, list) else parse_float_list(lam)
    if "op" in values and not isinstance(values["op"], list):
        values["op"] = [values["op"]]
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    cfg = RunConfig(command=args.command, **values)
    if cfg.noise < 0:
        raise ConfigError("--noise must be nonnegative")
    return cfg


COMMANDS = {"rule": cmd_rule, "approx": cmd_approx, "verify": cmd_verify, "table": cmd_table}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
