"""Additive energy of subsets of the paraboloid and empirical checks of its upper bounds."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, ContractError, ResourceLimitError
from .field import is_minus_one_square
from .paraboloid import (
    ParaboloidGeometry,
    maximal_isotropic_subspace,
    omega_surface_indices,
    orthogonal_complement_indices,
)
from .transform import GridFunction, convolve, encode

QUADRUPLE_LIMIT = 512


@dataclass(frozen=True, eq=False)
class PointSubset:
    geometry: ParaboloidGeometry
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted({int(i) for i in self.members}))
        if len(members) != len(tuple(self.members)):
            raise ContractError("subset members must be unique")
        if members and not (0 <= members[0] and members[-1] < self.geometry.size):
            raise ContractError("subset member out of range")
        object.__setattr__(self, "members", members)

    def __len__(self):
        return len(self.members)

    @classmethod
    def full(cls, geom):
        return cls(geom, tuple(range(geom.size)))

    def points(self) -> np.ndarray:
        return self.geometry.points[list(self.members)]

    def grid_indices(self) -> np.ndarray:
        return self.geometry.grid_index[list(self.members)]


def _energy_quadruple(E: PointSubset) -> int:
    if len(E) > QUADRUPLE_LIMIT:
        raise ResourceLimitError(f"quadruple method is capped at {QUADRUPLE_LIMIT} points")
    ctx = E.geometry.ctx
    pts = E.points()
    # direct-address membership table: a perfect hash of E over the grid
    member = np.zeros(ctx.q**E.geometry.d, dtype=bool)
    member[E.grid_indices()] = True
    sums = ctx.add_table[pts[:, None, :], pts[None, :, :]]
    total = 0
    for z in pts:
        w = encode(ctx, ctx.add_table[sums, ctx.neg_table[z]])
        total += int(np.count_nonzero(member[w]))
    return total


def _energy_convolution(E: PointSubset) -> int:
    geom = E.geometry
    ind = GridFunction.indicator(geom.ctx, geom.d, E.grid_indices())
    r = convolve(ind, ind).values
    value = float(np.sum(np.abs(r) ** 2))
    out = int(round(value))
    if abs(value - out) > 1e-6 * max(1.0, value):
        raise ConsistencyError(f"representation counts are not integral: {value}")
    return out


def additive_energy(E: PointSubset, method: str = "quadruple") -> int:
    """Number of ordered quadruples (x, y, z, w) in E with x + y = z + w.

    ``quadruple`` loops over (x, y, z) and looks up x + y - z in a membership table of E;
    ``convolution`` sums the squared representation counts of 1_E * 1_E.
    """
    method = method.lower()
    if method == "quadruple":
        return _energy_quadruple(E)
    if method == "convolution":
        return _energy_convolution(E)
    raise ContractError(f"unknown energy method {method!r}")


def _pair_energy(geom: ParaboloidGeometry, members) -> int:
    """Fast energy through pair-sum counts, used inside the search loop."""
    ctx = geom.ctx
    pts = geom.points[np.asarray(members, dtype=np.int64)]
    sums = encode(ctx, ctx.add_table[pts[:, None, :], pts[None, :, :]])
    _, counts = np.unique(np.ravel(sums), return_counts=True)
    return int(np.sum(counts.astype(np.int64) ** 2))


def energy_class(geom: ParaboloidGeometry) -> str:
    d = geom.d
    if d >= 4 and d % 2 == 0:
        return "even"
    if d >= 7 and d % 4 == 3 and not is_minus_one_square(geom.ctx):
        return "three_mod_four"
    return "none"


@dataclass(frozen=True)
class EnergyReport:
    d: int
    q: int
    size: int
    energy: int
    bounds: dict
    ratios: dict
    regime: str
    in_window: bool

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "q": self.q,
            "size": self.size,
            "energy": self.energy,
            "bounds": dict(self.bounds),
            "ratios": dict(self.ratios),
            "regime": self.regime,
            "in_window": self.in_window,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def energy_bounds(q: int, d: int, size: int, regime: str) -> tuple[dict, bool]:
    """Right-hand sides of the energy bounds at ``(q, d, |E|)``, plus the window flag."""
    n = float(size)
    bounds = {"cube": n**3, "mixed": None, "corollary": None}
    in_window = False
    if regime == "even":
        bounds["mixed"] = n**3 / q + q ** ((d - 2) / 4) * n**2.5 + q ** ((d - 2) / 2) * n**2
        in_window = q ** ((d - 2) / 2) <= n <= q ** ((d + 2) / 2)
        bounds["corollary"] = q ** ((d - 2) / 4) * n**2.5
    elif regime == "three_mod_four":
        bounds["mixed"] = n**3 / q + q ** ((d - 3) / 4) * n**2.5 + q ** ((d - 2) / 2) * n**2
        in_window = q ** ((d - 2) / 2) <= n <= q ** ((d + 1) / 2)
        bounds["corollary"] = q ** ((d - 3) / 4) * n**2.5 + q ** ((d - 2) / 2) * n**2
    return bounds, in_window


def energy_bound_report(E: PointSubset, energy: int | None = None) -> EnergyReport:
    if len(E) == 0:
        raise ContractError("energy report needs a nonempty subset")
    geom = E.geometry
    if energy is None:
        method = "quadruple" if len(E) <= QUADRUPLE_LIMIT else "convolution"
        energy = additive_energy(E, method)
    regime = energy_class(geom)
    bounds, in_window = energy_bounds(geom.q, geom.d, len(E), regime)
    ratios = {k: (energy / v if v else None) for k, v in bounds.items()}
    return EnergyReport(geom.d, geom.q, len(E), int(energy), bounds, ratios, regime, in_window)


def structured_candidates(geom: ParaboloidGeometry, size: int, rng) -> list[tuple[int, ...]]:
    """Subsets of Omega, or unions of Omega-cosets that stay inside P."""
    w = maximal_isotropic_subspace(geom.ctx, geom.d)
    omega = omega_surface_indices(geom, w)
    if size <= len(omega):
        return [tuple(omega[:size])]
    perp = orthogonal_complement_indices(geom, w)
    # group W-perp into W-cosets by a canonical representative
    ctx = geom.ctx
    base = geom.base
    cosets: dict[int, list[int]] = {}
    seen = set()
    for idx in perp:
        if idx in seen:
            continue
        shifted = encode(ctx, ctx.add_table[base[idx][None, :], w.elements])
        members = sorted(int(s) for s in np.ravel(shifted))
        seen.update(members)
        cosets[members[0]] = members
    groups = [cosets[k] for k in sorted(cosets)]
    out = []
    for order in (range(len(groups)), rng.permutation(len(groups))):
        chosen: list[int] = []
        for gi in order:
            if len(chosen) >= size:
                break
            chosen.extend(groups[gi])
        if len(chosen) >= size:
            out.append(tuple(sorted(chosen[:size])))
    return out


def _better(a: tuple[int, tuple], b: tuple[int, tuple] | None) -> bool:
    if b is None:
        return True
    return a[0] > b[0] or (a[0] == b[0] and a[1] < b[1])


def energy_extremizer_search(
    geom: ParaboloidGeometry,
    size: int,
    trials: int = 32,
    seed: int = 0,
    swaps: int = 200,
) -> tuple[PointSubset, EnergyReport]:
    """Largest-energy subset of the given size found by random, structured and swap search.

    Heuristic; the result is deterministic in ``seed``.
    """
    if not 1 <= size <= geom.size:
        raise ContractError(f"size must lie in [1, {geom.size}], got {size}")
    if size == geom.size:
        full = PointSubset.full(geom)
        return full, energy_bound_report(full)

    seeds = np.random.SeedSequence(seed).spawn(trials + 2)
    best = None
    for ss in seeds[:trials]:
        members = tuple(sorted(np.random.default_rng(ss).choice(geom.size, size, replace=False).tolist()))
        cand = (_pair_energy(geom, members), members)
        if _better(cand, best):
            best = cand
    for members in structured_candidates(geom, size, np.random.default_rng(seeds[trials])):
        cand = (_pair_energy(geom, members), members)
        if _better(cand, best):
            best = cand

    rng = np.random.default_rng(seeds[trials + 1])
    current = list(best[1])
    energy = best[0]
    for _ in range(swaps):
        outside = np.setdiff1d(np.arange(geom.size), current)
        if outside.size == 0:
            break
        i = int(rng.integers(len(current)))
        proposal = current.copy()
        proposal[i] = int(rng.choice(outside))
        e = _pair_energy(geom, proposal)
        if e > energy:
            current, energy = proposal, e
    cand = (energy, tuple(sorted(current)))
    if _better(cand, best):
        best = cand

    subset = PointSubset(geom, best[1])
    check = additive_energy(subset, "quadruple" if size <= QUADRUPLE_LIMIT else "convolution")
    if check != best[0]:
        raise ConsistencyError(f"search energy {best[0]} disagrees with recount {check}")
    return subset, energy_bound_report(subset, check)


def max_ratio(reports, key: str = "corollary") -> float:
    vals = [r.ratios[key] for r in reports if r.ratios.get(key) is not None]
    return max(vals) if vals else math.nan
