"""Named experiments.  Each ``cmd_*`` takes a config and returns a RunReport."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..energy import (
    PointSubset,
    additive_energy,
    energy_extremizer_search,
)
from ..errors import ContractError
from ..exponents import (
    classify,
    exponent,
    exponent_str,
    render_csv,
    render_markdown,
    table_cells,
    table_rows,
)
from ..field import FieldContext, is_minus_one_square
from ..machinery import (
    is_regular,
    l2_restriction_bounds,
    piece_count_bound,
    random_regular_function,
    regular_decomposition,
    verify_duality_identity,
    verify_slice_inequality,
)
from ..norms import (
    CSV_HEADER,
    fit_loglog,
    omega_witness_ratio,
    predicted_witness_slope,
    scaling_scan,
)
from ..paraboloid import (
    SurfaceFunction,
    build_paraboloid,
    dsigma_inverse_grid,
    exhaustive_isotropic_dimension,
    expected_isotropic_exponent,
    extension_operator,
    maximal_isotropic_subspace,
    orthogonal_complement_indices,
    quadratic_form,
    subspace_in_paraboloid,
)
from ..transform import (
    GridFunction,
    Measure,
    check_cap,
    convolve,
    fourier_forward,
    fourier_inverse,
    grid_size,
)
from .config import VERIFY_SUITES, ExperimentConfig

IDENTITY_TOL = 1e-9
RANDOM_SUBSET_MAX = 64


@dataclass
class CheckResult:
    """Outcome of one named check on one (d, q) cell."""

    check: str
    d: int
    q: int
    cases: int
    failures: int
    max_error: float
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "d": self.d,
            "q": self.q,
            "cases": self.cases,
            "failures": self.failures,
            "max_error": self.max_error,
            "detail": self.detail,
            "pass": self.passed,
        }


@dataclass
class RunReport:
    experiment: str
    config: dict
    results: list
    summary: dict
    wall_clock: float = 0.0
    version: str = __version__
    text: dict = field(default_factory=dict, repr=False)

    @property
    def passed(self) -> bool:
        return bool(self.summary.get("passed", True))

    @property
    def failed_checks(self) -> list:
        return list(self.summary.get("failed_checks", []))

    def payload(self) -> dict:
        """Everything except timing; identical for identical config and seed."""
        return {
            "experiment": self.experiment,
            "config": self.config,
            "results": self.results,
            "summary": self.summary,
            "version": self.version,
        }

    def to_dict(self) -> dict:
        out = self.payload()
        out["wall_clock"] = self.wall_clock
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict() if timing else self.payload(), sort_keys=True, indent=2)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json() + "\n"
        if fmt in self.text:
            return self.text[fmt]
        if fmt == "csv":
            return _results_csv(self.results)
        return _results_markdown(self)


def _results_csv(results: list) -> str:
    keys = _scalar_keys(results)
    buf = io.StringIO()
    w = csv.DictWriter(buf, keys, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for row in results:
        w.writerow(row)
    return buf.getvalue()


def _scalar_keys(results: list) -> list:
    keys = []
    for row in results:
        for k, v in row.items():
            if k not in keys and not isinstance(v, (dict, list)):
                keys.append(k)
    return keys


def _results_markdown(report: RunReport) -> str:
    lines = [f"# {report.experiment}", ""]
    status = "pass" if report.passed else "FAIL: " + ", ".join(report.failed_checks)
    lines += [f"status: {status}", ""]
    keys = _scalar_keys(report.results)
    if keys:
        lines += ["| " + " | ".join(keys) + " |", "|" + "---|" * len(keys)]
        for r in report.results:
            lines.append("| " + " | ".join(_cell(r.get(k, "")) for k in keys) + " |")
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _context(q: int, config: ExperimentConfig) -> FieldContext:
    return FieldContext.of_order(q, grid_cap=config.grid_cap)


def _rng(config: ExperimentConfig, *key: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, *key])


def _summarize(checks: list[CheckResult]) -> dict:
    failed = sorted({c.check for c in checks if not c.passed})
    return {
        "passed": not failed,
        "failed_checks": failed,
        "cells": len(checks),
        "failed_cells": [f"{c.check} (d={c.d}, q={c.q})" for c in checks if not c.passed],
    }


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    scale = max(1.0, float(np.max(np.abs(b))))
    return float(np.max(np.abs(a - b)) / scale)


# -- verify ------------------------------------------------------------------------------


def _check(name, d, q, errors, tol=IDENTITY_TOL, **detail) -> CheckResult:
    errors = list(errors)
    return CheckResult(
        name, d, q, len(errors),
        sum(1 for e in errors if not e <= tol),
        float(max(errors)) if errors else 0.0,
        detail,
    )


def _suite_dsigma_explicit(ctx, d, config, rng, gauss=None):
    geom = build_paraboloid(ctx, d)
    direct = extension_operator(SurfaceFunction.constant(geom), "direct").values
    explicit = dsigma_inverse_grid(geom, gauss=gauss).values
    return [_check("dsigma_explicit", d, ctx.q, [float(np.max(np.abs(direct - explicit)))])]


def _random_counting(ctx, d, rng):
    return GridFunction.random(ctx, d, rng)


def _suite_plancherel(ctx, d, config, rng, gauss=None):
    errs = []
    for _ in range(config.samples):
        g = _random_counting(ctx, d, rng)
        lhs = np.sum(np.abs(fourier_forward(g).values) ** 2) / g.size
        rhs = np.sum(np.abs(g.values) ** 2)
        errs.append(abs(lhs - rhs) / rhs)
    return [_check("plancherel", d, ctx.q, errs)]


def _suite_inversion(ctx, d, config, rng, gauss=None):
    errs = []
    for _ in range(config.samples):
        g = _random_counting(ctx, d, rng)
        errs.append(_rel(fourier_inverse(fourier_forward(g)).values, g.values))
    return [_check("inversion", d, ctx.q, errs)]


def _suite_convolution(ctx, d, config, rng, gauss=None):
    errs = []
    for _ in range(config.samples):
        a, b = _random_counting(ctx, d, rng), _random_counting(ctx, d, rng)
        lhs = fourier_forward(convolve(a, b)).values
        rhs = fourier_forward(a).values * fourier_forward(b).values
        errs.append(_rel(lhs, rhs))
    return [_check("convolution", d, ctx.q, errs)]


def _suite_duality(ctx, d, config, rng, gauss=None):
    geom = build_paraboloid(ctx, d)
    dsv = extension_operator(SurfaceFunction.constant(geom), "direct")
    errs = []
    for _ in range(config.samples):
        rep = verify_duality_identity(_random_counting(ctx, d, rng), dsv)
        errs.append(abs(rep.lhs - rep.rhs) / (1 + abs(rep.lhs)))
    return [_check("duality", d, ctx.q, errs)]


def _suite_slice(ctx, d, config, rng, gauss=None):
    ineq, equal, chain = [], [], []
    for _ in range(config.samples):
        g = random_regular_function(ctx, d, rng)
        for r in config.slice_rs:
            for rep in verify_slice_inequality(g, exponent(r)):
                if rep.check == "l2_chain":
                    chain.append(max(0.0, rep.lhs - rep.rhs) / max(1.0, rep.rhs))
                    continue
                ineq.append(max(0.0, rep.lhs - rep.rhs) / max(1.0, rep.lhs))
                equal.append(abs(rep.lhs - rep.details["restricted_rhs"]) / max(1.0, rep.lhs))
    return [
        _check("slice_inequality", d, ctx.q, ineq),
        _check("slice_restricted_equality", d, ctx.q, equal),
        _check("l2_chain", d, ctx.q, chain),
    ]


def _suite_bounds(ctx, d, config, rng, gauss=None):
    errs, ratios = [], []
    for _ in range(config.samples):
        rep = l2_restriction_bounds(random_regular_function(ctx, d, rng))
        for c in rep.checks:
            errs.append(max(0.0, c.lhs / c.rhs - 1))
            ratios.append(c.lhs / c.rhs)
    return [_check("regular_bounds", d, ctx.q, errs, tol=1e-12, max_ratio=max(ratios))]


def _random_wide_range(ctx, d, rng):
    """Sparse values whose moduli span many dyadic scales, a few below 2^-40 of the peak."""
    n = grid_size(ctx, d)
    mask = rng.random(n) < 0.6
    mags = 2.0 ** rng.uniform(-45, 0, n)
    vals = mask * mags * np.exp(2j * np.pi * rng.random(n))
    if not np.any(vals):
        vals[0] = 1.0
    return GridFunction(ctx, d, vals, Measure.COUNTING)


def _suite_decomposition(ctx, d, config, rng, gauss=None):
    recon, residual, irregular, count = [], [], [], []
    bound = piece_count_bound(ctx.q, d, config.depth)
    for _ in range(config.samples):
        g = _random_wide_range(ctx, d, rng)
        dec = regular_decomposition(g, config.depth)
        recon.append(float(np.max(np.abs(dec.reconstruct() - g.values))) / dec.peak)
        residual.append(float(np.max(np.abs(dec.residual.values))) / dec.peak / 2.0 ** -config.depth)
        irregular.append(float(sum(not is_regular(p.func) for p in dec.pieces)))
        count.append(len(dec.pieces) / bound)
    return [
        _check("decomposition_reconstruction", d, ctx.q, recon, tol=1e-12),
        _check("decomposition_residual", d, ctx.q, [max(0.0, x - 1) for x in residual], tol=0.0),
        _check("decomposition_regular", d, ctx.q, irregular, tol=0.0),
        _check("decomposition_count", d, ctx.q, [max(0.0, c - 1) for c in count], tol=0.0,
               max_pieces_over_bound=max(count)),
    ]


def _suite_subspace(ctx, d, config, rng, gauss=None):
    geom = build_paraboloid(ctx, d)
    w = maximal_isotropic_subspace(ctx, d)
    errs = []
    try:
        w.verify()
        errs.append(0.0)
    except Exception:
        errs.append(1.0)
    errs.append(float(w.dimension != expected_isotropic_exponent(ctx, d)))
    omega = subspace_in_paraboloid(w)
    errs.append(float(sum(not geom.contains(pt) for pt in omega)))
    # every coset of W inside W-perp also lies in P
    perp = orthogonal_complement_indices(geom, w)
    errs.append(float(len(perp) != ctx.q ** (d - 1 - w.dimension)))
    base = geom.base[perp]
    shifted = ctx.add_table[base[:, None, :], w.elements[None, :, :]]
    heights = quadratic_form(ctx, shifted.reshape(-1, d - 1)).reshape(len(perp), -1)
    errs.append(float(np.sum(heights != geom.heights[perp][:, None])))
    detail = {"dimension": w.dimension, "size": w.size}
    if d - 1 <= 3 and ctx.q <= 7:
        exhaustive = exhaustive_isotropic_dimension(ctx, d - 1)
        errs.append(float(exhaustive != w.dimension))
        detail["exhaustive_dimension"] = exhaustive
    return [_check("subspace", d, ctx.q, errs, tol=0.0, **detail)]


SUITES = {
    "dsigma_explicit": _suite_dsigma_explicit,
    "plancherel": _suite_plancherel,
    "inversion": _suite_inversion,
    "convolution": _suite_convolution,
    "duality": _suite_duality,
    "slice": _suite_slice,
    "bounds": _suite_bounds,
    "decomposition": _suite_decomposition,
    "subspace": _suite_subspace,
}


def _run_suite(task):
    name, d, q, config, gauss = task
    ctx = _context(q, config)
    check_cap(ctx, grid_size(ctx, d))
    rng = _rng(config, VERIFY_SUITES.index(name), d, q)
    return [c.to_dict() for c in SUITES[name](ctx, d, config, rng, gauss)]


def _map(tasks, fn, jobs: int):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def cmd_verify(config: ExperimentConfig, jobs: int = 1, gauss_override: complex | None = None) -> RunReport:
    """Run the exact-identity suites on every (d, q) cell.

    ``gauss_override`` replaces the Gauss sum in the closed form; it exists to
    inject a fault.
    """
    start = time.perf_counter()
    cells = config.cells()
    suites = config.suites or VERIFY_SUITES
    if not cells:
        raise ContractError("no cases: the (d, q) grid is empty")
    for d, q in cells:
        check_cap(_context(q, config), grid_size(_context(q, config), d))
    tasks = [(s, d, q, config, gauss_override) for s in suites for d, q in cells]
    rows = [row for block in _map(tasks, _run_suite, jobs) for row in block]
    checks = [CheckResult(r["check"], r["d"], r["q"], r["cases"], r["failures"], r["max_error"], r["detail"])
              for r in rows]
    return RunReport("verify", config.to_dict(), rows, _summarize(checks), time.perf_counter() - start)


# -- scan ---------------------------------------------------------------------------------


def cmd_scan(config: ExperimentConfig, jobs: int = 1) -> RunReport:
    """Fitted log-log slope of the best norm lower bound against q, per (d, p, r)."""
    start = time.perf_counter()
    if not config.pairs or not config.dims:
        raise ContractError("no cases: scan needs dims and (p, r) pairs")
    if len(config.qs) < 3:
        raise ContractError("a scan needs at least three q values")
    tasks = [(d, p, r, config) for d in config.dims for p, r in config.pairs]
    reports = _map(tasks, _scan_one, jobs)
    results = [rep.to_dict() for rep in reports]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER + ["slope", "intercept", "residual"])
    for rep in reports:
        for est in rep.estimates:
            w.writerow(est.csv_row() + [repr(rep.slope), repr(rep.intercept), repr(rep.residual)])
    summary = {"passed": True, "failed_checks": [],
               "slopes": {f"d={r['d']} p={r['p']} r={r['r']}": r["slope"] for r in results}}
    return RunReport("scan", config.to_dict(), results, summary, time.perf_counter() - start,
                     text={"csv": buf.getvalue()})


def _scan_one(task):
    d, p, r, config = task
    return scaling_scan(d, p, r, config.qs, config.restarts, config.max_iter, config.tol,
                        config.seed, config.grid_cap)


# -- witness -------------------------------------------------------------------------------

WITNESS_TOL = 0.05


def cmd_witness(config: ExperimentConfig, jobs: int = 1) -> RunReport:
    """Growth in q of the extension ratio of 1_Omega, against its predicted exponent."""
    start = time.perf_counter()
    if not config.cells() or not config.pairs:
        raise ContractError("no cases: witness needs dims, qs and (p, r) pairs")
    results, failed = [], []
    for d in config.dims:
        for ps, rs in config.pairs:
            p, r = exponent(ps), exponent(rs)
            points = []
            for q in config.qs:
                ctx = _context(q, config)
                geom = build_paraboloid(ctx, d)
                ratio, k = omega_witness_ratio(geom, p, r)
                cls = classify(d, is_minus_one_square(ctx))
                points.append({"q": q, "ratio": ratio, "k": k, "field_class": cls.value})
            # the subspace dimension can change with q mod 4; fit each class separately
            for k in sorted({pt["k"] for pt in points}):
                group = [pt for pt in points if pt["k"] == k]
                pred = float(predicted_witness_slope(d, k, p, r))
                entry = {
                    "d": d, "p": exponent_str(p), "r": exponent_str(r), "k": k,
                    "field_classes": sorted({pt["field_class"] for pt in group}),
                    "points": [[pt["q"], pt["ratio"]] for pt in group],
                    "predicted_slope": pred,
                    "degenerate": k == 0,
                }
                if len(group) >= 2:
                    slope, _, _ = fit_loglog([(pt["q"], pt["ratio"]) for pt in group])
                    entry["slope"] = slope
                    entry["pass"] = abs(slope - pred) <= WITNESS_TOL
                else:
                    entry["slope"] = None
                    entry["pass"] = True
                if not entry["pass"]:
                    failed.append("witness_slope")
                results.append(entry)
    summary = {"passed": not failed, "failed_checks": sorted(set(failed))}
    return RunReport("witness", config.to_dict(), results, summary, time.perf_counter() - start)


# -- energy ---------------------------------------------------------------------------------


def cmd_energy(config: ExperimentConfig, jobs: int = 1) -> RunReport:
    """Extremizer searches with bound ratios, plus the two-method and closed-form oracles."""
    start = time.perf_counter()
    if not config.cells():
        raise ContractError("no cases: energy needs dims and qs")
    results, failed = [], set()
    max_ratio: dict = {}
    for d, q in config.cells():
        ctx = _context(q, config)
        geom = build_paraboloid(ctx, d)
        rng = _rng(config, 100, d, q)
        # the two counting routes agree on random subsets
        mismatches = 0
        for _ in range(config.samples):
            size = int(rng.integers(1, min(geom.size, RANDOM_SUBSET_MAX) + 1))
            E = PointSubset(geom, rng.choice(geom.size, size, replace=False))
            mismatches += additive_energy(E, "quadruple") != additive_energy(E, "convolution")
        results.append({"check": "energy_methods", "d": d, "q": q, "cases": config.samples,
                        "failures": int(mismatches)})
        if mismatches:
            failed.add("energy_methods")
        if d == 2:
            full = additive_energy(PointSubset.full(geom), "quadruple")
            ok = full == 2 * q * q - q
            results.append({"check": "energy_full_parabola", "d": d, "q": q, "energy": full,
                            "expected": 2 * q * q - q, "pass": ok})
            if not ok:
                failed.add("energy_full_parabola")
        for size in config.sizes:
            if size > geom.size:
                continue
            _, rep = energy_extremizer_search(geom, size, config.trials, config.seed)
            row = {"check": "energy_search", **rep.to_dict()}
            ratio = rep.ratios.get("corollary")
            if rep.in_window and ratio is not None:
                row["pass"] = ratio <= config.energy_constant
                if not row["pass"]:
                    failed.add("energy_corollary")
                key = rep.regime
                max_ratio[key] = max(max_ratio.get(key, 0.0), ratio)
            results.append(row)
    summary = {"passed": not failed, "failed_checks": sorted(failed),
               "max_corollary_ratio": max_ratio, "constant": config.energy_constant}
    return RunReport("energy", config.to_dict(), results, summary, time.perf_counter() - start)


# -- report -----------------------------------------------------------------------------------


def cmd_report(config: ExperimentConfig, jobs: int = 1) -> RunReport:
    """Regenerate the exponent tables for the configured dimensions."""
    start = time.perf_counter()
    dims = config.dims or (2, 3, 4, 5, 6, 7)
    results = []
    for d, cls, q_prime in table_cells(dims):
        for row in table_rows(d, cls, q_prime):
            results.append({"d": d, "field_class": cls.value, "q_prime": q_prime, "p": row.p,
                            "r": row.r, "source": row.source, "note": row.note})
    text = {"markdown": render_markdown(dims), "csv": render_csv(dims)}
    return RunReport("report", config.to_dict(), results, {"passed": True, "failed_checks": [],
                     "rows": len(results)}, time.perf_counter() - start, text=text)


COMMANDS = {
    "verify": cmd_verify,
    "scan": cmd_scan,
    "witness": cmd_witness,
    "energy": cmd_energy,
    "report": cmd_report,
}


def run(config: ExperimentConfig, jobs: int = 1, **hooks) -> RunReport:
    return COMMANDS[config.experiment](config, jobs=jobs, **hooks)

