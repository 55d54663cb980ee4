"""Lower bounds for the extension operator norm L^p(P, dsigma) -> L^r(F_q^d, dm).

Only lower bounds are certified: every value returned is the ratio
||(f dsigma)^v||_r / ||f||_p of an explicit witness ``f``.  The one exact
case is p = r = 2, where the operator is sqrt(q) times an isometry.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConsistencyError, ContractError
from .exponents import Exponent, conjugate, exponent, exponent_str
from .field import FieldContext
from .paraboloid import (
    ParaboloidGeometry,
    SurfaceFunction,
    build_paraboloid,
    extension_operator,
    maximal_isotropic_subspace,
    omega_surface_indices,
    restriction_operator,
    surface_lp_norm,
)
from .transform import GridFunction, Measure, lp_norm, weighted_lp_norm

logger = logging.getLogger(__name__)

METHODS = ("Exact22", "Ascent", "IndicatorSweep", "ConstantFunction")


@dataclass
class NormEstimate:
    d: int
    q: int
    p: Exponent
    r: Exponent
    value: float
    witness: SurfaceFunction
    method: str
    restarts: int = 0
    iterations: int = 0
    seed: int = 0
    converged: bool = True
    g_witness: GridFunction | None = field(default=None, repr=False)
    history: list = field(default_factory=list, repr=False)

    def recompute(self) -> float:
        return extension_ratio(self.witness, self.p, self.r)

    def csv_row(self) -> list:
        p, r = _num_den(self.p), _num_den(self.r)
        return [
            self.d, self.q, p[0], p[1], r[0], r[1], repr(float(self.value)),
            self.method, self.restarts, self.iterations, self.converged, self.seed,
        ]


CSV_HEADER = ["d", "q", "p_num", "p_den", "r_num", "r_den", "value", "method",
              "restarts", "iterations", "converged", "seed"]


def _num_den(x: Exponent) -> tuple:
    if x == math.inf:
        return ("inf", 1)
    return (x.numerator, x.denominator)


def estimates_to_csv(estimates) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for est in estimates:
        writer.writerow(est.csv_row())
    return buf.getvalue()


def extension_ratio(f: SurfaceFunction, p, r) -> float:
    """||(f dsigma)^v||_{L^r(dm)} / ||f||_{L^p(P, dsigma)}."""
    p, r = exponent(p), exponent(r)
    denom = surface_lp_norm(f, float(p))
    if denom == 0:
        raise ContractError("witness must be nonzero")
    return lp_norm(extension_operator(f, "transform"), float(r)) / denom


def restriction_ratio(g: GridFunction, geom: ParaboloidGeometry, p, r) -> float:
    """||g^||_{L^{p'}(P, dsigma)} / ||g||_{L^{r'}(dm)}; bounded by the same operator norm."""
    pc, rc = conjugate(exponent(p)), conjugate(exponent(r))
    return surface_lp_norm(restriction_operator(g, geom), float(pc)) / lp_norm(g, float(rc))


def holder_maximizer(h: np.ndarray, p: float, weight: float) -> np.ndarray:
    """Unit vector of L^p(weight * counting) maximizing Re(weight * sum x conj(h)).

    The maximum equals the L^{p'} norm of h.  Zero entries of h stay zero.
    """
    mags = np.abs(h)
    top = mags.max()
    if top == 0:
        raise ConsistencyError("dual vector vanished during ascent")
    phase = np.zeros_like(h)
    nz = mags > 0
    phase[nz] = h[nz] / mags[nz]
    if np.isinf(p):
        return phase
    if p == 1:
        k = int(np.argmax(mags))
        x = np.zeros_like(h)
        x[k] = phase[k] / weight
        return x
    pc = p / (p - 1)
    x = phase * (mags / top) ** (pc - 1)
    return x / weighted_lp_norm(x, p, weight)


def _ascent(geom, p, r, f0, max_iter, tol):
    """Alternating maximization of Re<(f dsigma)^v, g> over the two unit balls."""
    ctx = geom.ctx
    pf, rf = float(p), float(r)
    rc = float(conjugate(r))
    w_surf = 1.0 / geom.size
    f = holder_maximizer(f0, pf, w_surf)
    fsurf = SurfaceFunction(geom, f)
    u = extension_operator(fsurf, "transform").values
    value = weighted_lp_norm(u, rf)
    history = [value]
    g = None
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        g_new = holder_maximizer(u, rc, 1.0)
        h = restriction_operator(GridFunction(ctx, geom.d, g_new, Measure.COUNTING), geom).values
        half = weighted_lp_norm(h, float(conjugate(p)), w_surf)
        f_new = holder_maximizer(h, pf, w_surf)
        u_new = extension_operator(SurfaceFunction(geom, f_new), "transform").values
        new_value = weighted_lp_norm(u_new, rf)
        slack = 1e-9 * max(1.0, value)
        if half < value - slack or new_value < half - slack:
            raise ConsistencyError(
                f"ascent objective decreased: {value} -> {half} -> {new_value}"
            )
        gain = (new_value - value) / value
        f, u, g = f_new, u_new, g_new
        value = max(value, new_value)
        history.append(new_value)
        if gain < tol:
            converged = True
            break
    return SurfaceFunction(geom, f), g, it, converged, history


def _sweep_candidates(geom: ParaboloidGeometry, rng, n_random: int = 4):
    yield "ConstantFunction", SurfaceFunction.constant(geom)
    w = maximal_isotropic_subspace(geom.ctx, geom.d)
    yield "IndicatorSweep", SurfaceFunction.indicator(geom, omega_surface_indices(geom, w))
    yield "IndicatorSweep", SurfaceFunction.point_mass(geom, 0)
    for _ in range(n_random):
        k = int(rng.integers(1, geom.size + 1))
        yield "IndicatorSweep", SurfaceFunction.indicator(geom, rng.choice(geom.size, k, replace=False))


def norm_lower_bound(
    geom: ParaboloidGeometry,
    p,
    r,
    restarts: int = 4,
    max_iter: int = 200,
    tol: float = 1e-10,
    seed: int = 0,
) -> NormEstimate:
    """Best witness ratio from dual ascent restarts and a sweep of structured test functions."""
    p, r = exponent(p), exponent(r)
    if restarts < 1:
        raise ContractError("restarts must be >= 1")
    children = np.random.SeedSequence(seed).spawn(restarts + 1)
    best: NormEstimate | None = None
    total_iters = 0
    all_converged = True
    for child in children[:restarts]:
        rng = np.random.default_rng(child)
        f0 = rng.standard_normal(geom.size) + 1j * rng.standard_normal(geom.size)
        fw, gw, iters, conv, hist = _ascent(geom, p, r, f0, max_iter, tol)
        total_iters += iters
        all_converged &= conv
        value = extension_ratio(fw, p, r)
        if best is None or value > best.value:
            best = NormEstimate(geom.d, geom.q, p, r, value, fw, "Ascent", g_witness=gw, history=hist)
    ascent_g = best.g_witness
    rng = np.random.default_rng(children[restarts])
    for method, f in _sweep_candidates(geom, rng):
        value = extension_ratio(f, p, r)
        if value > best.value:
            best = NormEstimate(geom.d, geom.q, p, r, value, f, method, history=best.history)
    best.g_witness = ascent_g
    best.restarts, best.iterations, best.seed, best.converged = restarts, total_iters, seed, all_converged
    logger.debug("R*(%s -> %s) >= %.6g at d=%d q=%d via %s", p, r, best.value, geom.d, geom.q, best.method)
    return best


def exact_norm_2_2(geom: ParaboloidGeometry, trials: int = 20, seed: int = 0) -> float:
    """sqrt(q), after checking ||(f dsigma)^v||_2 = sqrt(q) ||f||_2 on random f."""
    rng = np.random.default_rng(seed)
    target = math.sqrt(geom.q)
    for _ in range(trials):
        f = SurfaceFunction(geom, rng.standard_normal(geom.size) + 1j * rng.standard_normal(geom.size))
        lhs = lp_norm(extension_operator(f, "direct"), 2)
        rhs = target * surface_lp_norm(f, 2)
        if abs(lhs - rhs) > 1e-9 * rhs:
            raise ConsistencyError(f"L2 identity failed: {lhs} vs {rhs}")
    return target


# -- q-scaling -----------------------------------------------------------------


@dataclass
class ScanReport:
    d: int
    p: Exponent
    r: Exponent
    points: list
    slope: float
    intercept: float
    residual: float
    estimates: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "p": exponent_str(self.p),
            "r": exponent_str(self.r),
            "points": [[q, v] for q, v in self.points],
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def fit_loglog(points) -> tuple[float, float, float]:
    """Unweighted least-squares slope, intercept and RMS residual of log v against log q."""
    x = np.log([q for q, _ in points])
    y = np.log([v for _, v in points])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


def scaling_scan(
    d: int,
    p,
    r,
    q_list,
    restarts: int = 4,
    max_iter: int = 200,
    tol: float = 1e-10,
    seed: int = 0,
    grid_cap: int | None = None,
) -> ScanReport:
    if len(q_list) < 3:
        raise ContractError("a scaling scan needs at least three field sizes")
    estimates = []
    for q in q_list:
        ctx = FieldContext.of_order(q) if grid_cap is None else FieldContext.of_order(q, grid_cap=grid_cap)
        geom = build_paraboloid(ctx, d)
        estimates.append(norm_lower_bound(geom, p, r, restarts, max_iter, tol, seed))
    points = [(est.q, est.value) for est in estimates]
    slope, intercept, resid = fit_loglog(points)
    return ScanReport(d, exponent(p), exponent(r), points, slope, intercept, resid, estimates)


# -- subspace witnesses ----------------------------------------------------------


def omega_witness_ratio(geom: ParaboloidGeometry, p, r) -> tuple[float, int]:
    """Extension ratio of the indicator of Omega = W x {0}, and k = log_q |Omega|."""
    w = maximal_isotropic_subspace(geom.ctx, geom.d)
    f = SurfaceFunction.indicator(geom, omega_surface_indices(geom, w))
    return extension_ratio(f, p, r), w.dimension


def predicted_witness_slope(d: int, k: int, p, r) -> Fraction | float:
    """Growth exponent in q of the Omega ratio: (d-k)/r - (d-1-k)(1 - 1/p).

    Positive exactly when (p, r) violates r >= p(d-k)/((p-1)(d-1-k)).
    """
    p, r = exponent(p), exponent(r)
    inv_p = Fraction(0) if p == math.inf else 1 / Fraction(p)
    inv_r = Fraction(0) if r == math.inf else 1 / Fraction(r)
    return (d - k) * inv_r - (d - 1 - k) * (1 - inv_p)
