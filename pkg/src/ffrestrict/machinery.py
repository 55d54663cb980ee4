"""Regular sets and functions, their dyadic decomposition, and the slice-lifting identities.

A function on (F_q^d, dm) is sliced along its last coordinate.  Each slice
``g_a`` transplants onto the paraboloid as ``h_a(n, n.n) = g(n, a)``, and
the oscillatory kernel K = (dsigma)^v - delta_0 turns convolution with a
slice into an extension of ``h_a``.  The checks here evaluate both sides of
each identity by separate routes and report the gap.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .exponents import exponent
from .field import FieldContext
from .paraboloid import (
    ParaboloidGeometry,
    SurfaceFunction,
    build_paraboloid,
    extension_operator,
    restriction_operator,
    surface_lp_norm,
)
from .transform import GridFunction, Measure, convolve, grid_size, inner, lp_norm, weighted_lp_norm

DEFAULT_DEPTH = 40
MODULUS_ATOL = 1e-12


@dataclass(frozen=True)
class LevelStructure:
    support: np.ndarray
    slices: dict  # level a -> flat indices of G_a
    q: int

    @property
    def levels(self) -> list[int]:
        return sorted(self.slices)

    def sizes(self) -> dict:
        return {a: len(ix) for a, ix in self.slices.items()}

    def __len__(self):
        return len(self.support)


def level_structure(g: GridFunction) -> LevelStructure:
    support = g.support()
    last = support % g.q
    slices = {int(a): support[last == a] for a in np.unique(last)}
    return LevelStructure(support, slices, g.q)


@dataclass(frozen=True)
class RegularityCheck:
    regular: bool
    certificate: dict | None = None

    def __bool__(self):
        return self.regular


def is_regular(g: GridFunction, atol: float = MODULUS_ATOL) -> RegularityCheck:
    """Regular support (slice sizes within a factor 2) and 1/2 <= |g| <= 1 there.

    ``atol`` absorbs rounding in the modulus test only.
    """
    ls = level_structure(g)
    if len(ls) == 0:
        return RegularityCheck(False, {"reason": "empty support"})
    mags = np.abs(g.values[ls.support])
    low = np.flatnonzero(mags < 0.5 - atol)
    high = np.flatnonzero(mags > 1 + atol)
    bad = np.concatenate([low, high])
    if bad.size:
        m = int(ls.support[bad[0]])
        return RegularityCheck(False, {"reason": "modulus", "m": m, "value": float(abs(g.values[m]))})
    sizes = ls.sizes()
    a_min = min(sizes, key=lambda a: (sizes[a], a))
    a_max = max(sizes, key=lambda a: (sizes[a], -a))
    if sizes[a_max] > 2 * sizes[a_min]:
        return RegularityCheck(
            False,
            {"reason": "levels", "a": a_min, "a_prime": a_max,
             "sizes": [sizes[a_min], sizes[a_max]]},
        )
    return RegularityCheck(True)


@dataclass(frozen=True)
class RegularPiece:
    coefficient: float
    func: GridFunction
    levels: LevelStructure
    modulus_level: int
    size_class: int


@dataclass(frozen=True)
class Decomposition:
    pieces: list
    residual: GridFunction
    peak: float
    depth: int

    def reconstruct(self) -> np.ndarray:
        out = self.residual.values.copy()
        for piece in self.pieces:
            out = out + piece.coefficient * piece.func.values
        return out


def _dyadic_level(ratio: np.ndarray) -> np.ndarray:
    """k with ratio in (2^-(k+1), 2^-k], for ratio in (0, 1]."""
    mant, expo = np.frexp(ratio)  # ratio = mant * 2^expo, mant in [0.5, 1)
    return np.where(mant == 0.5, 1 - expo, -expo)


def regular_decomposition(g: GridFunction, depth: int = DEFAULT_DEPTH) -> Decomposition:
    """Split g into regular pieces by dyadic modulus level, then by dyadic slice size.

    Points with |g| <= 2^-depth max|g| go to the residual.
    """
    if g.measure is not Measure.COUNTING:
        raise ContractError("regular decomposition works on counting-measure functions")
    if depth < 1:
        raise ContractError("depth must be >= 1")
    mags = np.abs(g.values)
    peak = float(mags.max())
    if peak == 0:
        raise ContractError("cannot decompose the zero function")
    support = np.flatnonzero(mags)
    k = _dyadic_level(mags[support] / peak)
    pieces = []
    residual = np.zeros_like(g.values)
    deep = k >= depth
    residual[support[deep]] = g.values[support[deep]]
    for level in np.unique(k[~deep]):
        bucket = support[k == level]
        scale = peak * 2.0 ** (-int(level))
        last = bucket % g.q
        counts = {int(a): int(np.sum(last == a)) for a in np.unique(last)}
        size_class = {a: int(math.floor(math.log2(c))) for a, c in counts.items()}
        for cls in sorted(set(size_class.values())):
            levels_here = [a for a, c in size_class.items() if c == cls]
            members = bucket[np.isin(last, levels_here)]
            vals = np.zeros_like(g.values)
            vals[members] = g.values[members] / scale
            func = GridFunction(g.ctx, g.d, vals, Measure.COUNTING)
            pieces.append(RegularPiece(scale, func, level_structure(func), int(level), cls))
    return Decomposition(pieces, GridFunction(g.ctx, g.d, residual, Measure.COUNTING), peak, depth)


def piece_count_bound(q: int, d: int, depth: int = DEFAULT_DEPTH) -> float:
    return depth * (d * math.log2(q) + 1)


# -- slice lifting ------------------------------------------------------------------


@dataclass(frozen=True)
class SliceLift:
    level: int
    slice_func: GridFunction
    lifted: SurfaceFunction


def slice_function(g: GridFunction, a: int) -> GridFunction:
    """g restricted to the hyperplane m_d = a."""
    vals = np.zeros_like(g.values)
    idx = np.arange(a, g.size, g.q)
    vals[idx] = g.values[idx]
    return g.with_values(vals)


def slice_to_surface(g: GridFunction, a: int, geom: ParaboloidGeometry | None = None) -> SliceLift:
    """h_a on P with h_a(n, n.n) = g(n, a)."""
    ls = level_structure(g)
    if a not in ls.slices:
        raise ContractError(f"level {a} carries no support of g")
    geom = geom or build_paraboloid(g.ctx, g.d)
    # P is indexed by its base n, and (n, a) sits at flat index n * q + a
    h = g.values[np.arange(geom.size) * g.q + a]
    return SliceLift(a, slice_function(g, a), SurfaceFunction(geom, h))


def bochner_riesz_kernel(geom: ParaboloidGeometry) -> GridFunction:
    """K = (dsigma)^v - delta_0, with (dsigma)^v from the direct surface sum."""
    dsv = extension_operator(SurfaceFunction.constant(geom), "direct")
    vals = dsv.values.copy()
    vals[0] -= 1.0
    return dsv.with_values(vals)


# -- checks ----------------------------------------------------------------------------


@dataclass
class CheckReport:
    check: str
    params: dict
    lhs: float
    rhs: float
    passed: bool
    details: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else math.inf

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _params(g: GridFunction, **extra) -> dict:
    out = {"q": g.q, "d": g.d}
    out.update(extra)
    return out


def verify_duality_identity(g: GridFunction, dsigma_v: GridFunction | None = None) -> CheckReport:
    """||g^||^2 over (P, dsigma) against <g, g * (dsigma)^v> computed by direct convolution."""
    geom = build_paraboloid(g.ctx, g.d)
    lhs = surface_lp_norm(restriction_operator(g, geom), 2) ** 2
    if dsigma_v is None:
        dsigma_v = extension_operator(SurfaceFunction.constant(geom), "direct")
    rhs_c = inner(g, convolve(dsigma_v, g))
    gap = abs(lhs - rhs_c)
    return CheckReport(
        "duality_identity",
        _params(g),
        float(lhs),
        float(rhs_c.real),
        gap < 1e-9 * (1 + abs(lhs)),
        {"abs_gap": gap, "rhs_imag": rhs_c.imag},
    )


def verify_slice_inequality(g: GridFunction, r, kernel: GridFunction | None = None) -> list[CheckReport]:
    """Per level a: ||g_a * K||_r against q^((d-1)/2) ||(h_a dsigma)^v||_r.

    Also checks equality with the right side restricted to last coordinate != 0,
    and the assembled bound
    ||g^||^2 <= ||g||_2^2 + ||g||_{r'} sum_a q^((d-1)/2) ||(h_a dsigma)^v||_r.
    """
    check = is_regular(g)
    if not check:
        raise ContractError(f"slice inequality needs a regular function: {check.certificate}")
    rf = float(exponent(r))
    geom = build_paraboloid(g.ctx, g.d)
    kernel = bochner_riesz_kernel(geom) if kernel is None else kernel
    scale = g.q ** ((g.d - 1) / 2)
    coords_last = np.arange(g.size) % g.q
    reports = []
    rhs_sum = 0.0
    for a in level_structure(g).levels:
        lift = slice_to_surface(g, a, geom)
        lhs = lp_norm(convolve(kernel, lift.slice_func), rf)
        ext = extension_operator(lift.lifted, "direct").values
        rhs = scale * weighted_lp_norm(ext, rf)
        restricted = scale * weighted_lp_norm(ext[coords_last != 0], rf)
        tol = 1e-9 * max(1.0, lhs)
        ok = lhs <= rhs + tol and abs(lhs - restricted) <= tol
        rhs_sum += rhs
        reports.append(
            CheckReport(
                "slice_inequality",
                _params(g, r=str(r), level=a),
                float(lhs),
                float(rhs),
                bool(ok),
                {"restricted_rhs": float(restricted), "support": int(np.count_nonzero(lift.lifted.values)),
                 "slice_size": len(level_structure(g).slices[a])},
            )
        )
    actual_sq = surface_lp_norm(restriction_operator(g, geom), 2) ** 2
    rc = float(np.inf) if rf == 1 else rf / (rf - 1)
    chain_rhs = lp_norm(g, 2) ** 2 + lp_norm(g, rc) * rhs_sum
    reports.append(
        CheckReport(
            "l2_chain",
            _params(g, r=str(r)),
            float(actual_sq),
            float(chain_rhs),
            bool(actual_sq <= chain_rhs * (1 + 1e-12) + 1e-12),
        )
    )
    return reports


@dataclass
class BoundsReport:
    actual: float
    size: int
    levels: int
    checks: list
    reported: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "actual": self.actual,
            "size": self.size,
            "levels": self.levels,
            "checks": [c.to_dict() for c in self.checks],
            "reported": self.reported,
        }


def regime_bounds(q: int, d: int, size: int, levels: int, regime: str) -> dict:
    """Right sides of the regime-specific L2 restriction bounds (hidden constants dropped)."""
    out = {"small_support": size**0.5 + q ** ((1 - d) / 4) * size}
    if regime == "even":
        out["energy_even"] = size**0.5 + size ** (11 / 16) * levels ** (3 / 16) * q ** ((6 - 3 * d) / 32)
    elif regime == "three_mod_four":
        out["energy_three_mod_four"] = (
            size**0.5
            + size ** (11 / 16) * levels ** (3 / 16) * q ** ((5 - 3 * d) / 32)
            + size ** (5 / 8) * levels ** (1 / 4) * q ** ((2 - d) / 16)
        )
    return out


def l2_restriction_bounds(g: GridFunction) -> BoundsReport:
    """||g^||_{L^2(P, dsigma)} against the constant-free bounds for regular g.

    Asserted: actual <= sqrt(q |G|) and actual^2 <= |G| + q^((1-d)/2) |G|^2.
    Reported only: the regime bounds whose constants are not known.
    """
    check = is_regular(g)
    if not check:
        raise ContractError(f"bounds need a regular function: {check.certificate}")
    from .energy import energy_class

    geom = build_paraboloid(g.ctx, g.d)
    ls = level_structure(g)
    size, nlev = len(ls), len(ls.levels)
    actual = surface_lp_norm(restriction_operator(g, geom), 2)
    q, d = g.q, g.d
    plancherel = math.sqrt(q * size)
    small = size + q ** ((1 - d) / 2) * size**2
    checks = [
        CheckReport("plancherel_bound", _params(g), actual, plancherel,
                    actual <= plancherel * (1 + 1e-12)),
        CheckReport("small_support_bound", _params(g), actual**2, small,
                    actual**2 <= small * (1 + 1e-12)),
    ]
    reported = {k: {"bound": v, "ratio": actual / v}
                for k, v in regime_bounds(q, d, size, nlev, energy_class(geom)).items()}
    return BoundsReport(actual, size, nlev, checks, reported)


def random_regular_function(ctx: FieldContext, d: int, rng, max_levels: int | None = None) -> GridFunction:
    """Random regular function: a few levels, slice sizes within a factor 2, |g| in [1/2, 1]."""
    q = ctx.q
    n = grid_size(ctx, d)
    slice_cap = n // q
    nlev = int(rng.integers(1, (max_levels or q) + 1))
    levels = rng.choice(q, nlev, replace=False)
    base = int(rng.integers(1, slice_cap + 1))
    vals = np.zeros(n, complex)
    for a in levels:
        k = int(rng.integers(base, min(2 * base, slice_cap) + 1))
        rows = rng.choice(slice_cap, k, replace=False)
        idx = rows * q + a
        vals[idx] = rng.uniform(0.5, 1.0, k) * np.exp(2j * np.pi * rng.random(k))
    return GridFunction(ctx, d, vals, Measure.COUNTING)
