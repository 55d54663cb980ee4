"""The paraboloid xi_d = xi_1^2 + ... + xi_{d-1}^2, its surface measure, and subspaces lying in it."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConsistencyError, ContractError
from .field import FieldContext, gauss_sum, sqrt_minus_one
from .transform import (
    GridFunction,
    Measure,
    check_cap,
    context_from_dict,
    encode,
    fourier_forward,
    fourier_inverse,
    grid_coords,
    grid_size,
    weighted_lp_norm,
)


@dataclass(frozen=True, eq=False)
class ParaboloidGeometry:
    """Points of P indexed by their first ``d - 1`` coordinates (base-q integer)."""

    ctx: FieldContext
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ContractError("the paraboloid needs d >= 2")
        check_cap(self.ctx, self.ctx.q ** (self.d - 1))

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def size(self) -> int:
        return self.ctx.q ** (self.d - 1)

    @cached_property
    def base(self) -> np.ndarray:
        """``(|P|, d-1)`` array of the free coordinates."""
        return grid_coords(self.ctx, self.d - 1)

    @cached_property
    def heights(self) -> np.ndarray:
        """The last coordinate xi_1^2 + ... + xi_{d-1}^2 of every point."""
        sq = self.ctx.mul_table[self.base, self.base]
        out = sq[:, 0]
        for j in range(1, self.d - 1):
            out = self.ctx.add_table[out, sq[:, j]]
        return out

    @cached_property
    def points(self) -> np.ndarray:
        return np.column_stack([self.base, self.heights])

    @cached_property
    def grid_index(self) -> np.ndarray:
        """Flat index of every point of P inside the full grid F_q^d."""
        return (self.base @ (self.q ** np.arange(self.d - 2, -1, -1))) * self.q + self.heights

    def point_index(self, xi_base) -> int:
        return encode(self.ctx, xi_base)

    def contains(self, point) -> bool:
        point = np.asarray(point)
        base = point[:-1]
        sq = self.ctx.mul_table[base, base]
        total = 0
        for s in sq:
            total = self.ctx.add(total, s)
        return int(total) == int(point[-1])

    def indicator_grid(self) -> GridFunction:
        """P as a subset of (F_q^d, dm)."""
        return GridFunction.indicator(self.ctx, self.d, self.grid_index)


def build_paraboloid(ctx: FieldContext, d: int) -> ParaboloidGeometry:
    return ParaboloidGeometry(ctx, d)


@dataclass(frozen=True, eq=False)
class SurfaceFunction:
    geometry: ParaboloidGeometry
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex).reshape(-1).copy()
        if vals.size != self.geometry.size:
            raise ContractError(f"expected {self.geometry.size} values, got {vals.size}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, geom, c=1.0):
        return cls(geom, np.full(geom.size, c, complex))

    @classmethod
    def indicator(cls, geom, indices):
        vals = np.zeros(geom.size, complex)
        vals[np.asarray(list(indices), dtype=np.int64)] = 1.0
        return cls(geom, vals)

    @classmethod
    def point_mass(cls, geom, index, height=None):
        vals = np.zeros(geom.size, complex)
        vals[index] = geom.size if height is None else height
        return cls(geom, vals)

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)

    def to_dict(self) -> dict:
        ctx = self.geometry.ctx
        return {
            "q": ctx.q,
            "p": ctx.p,
            "n": ctx.n,
            "modulus": list(ctx.modulus),
            "d": self.geometry.d,
            "measure": "surface",
            "surface": True,
            "values": [[float(z.real), float(z.imag)] for z in self.values],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "SurfaceFunction":
        if not obj.get("surface"):
            raise ContractError("payload is not marked as a surface function")
        geom = ParaboloidGeometry(context_from_dict(obj), int(obj["d"]))
        return cls(geom, np.array([complex(re, im) for re, im in obj["values"]]))

    @classmethod
    def from_json(cls, text: str) -> "SurfaceFunction":
        return cls.from_dict(json.loads(text))


def surface_lp_norm(f: SurfaceFunction, p) -> float:
    return weighted_lp_norm(f.values, p, 1.0 / f.geometry.size)


def _phase_chunks(geom: ParaboloidGeometry, rows: np.ndarray, block: int = 1 << 22):
    """Yield ``(start, stop, T)`` where ``T[i, j] = Tr(rows[i] . xi_j)`` mod p over P."""
    ctx = geom.ctx
    pts = geom.points
    step = max(1, block // max(1, geom.size))
    for start in range(0, rows.shape[0], step):
        chunk = rows[start : start + step]
        acc = np.zeros((chunk.shape[0], geom.size), dtype=np.int64)
        for j in range(geom.d):
            acc += ctx.trace_table[ctx.mul_table[chunk[:, j][:, None], pts[:, j][None, :]]]
        yield start, start + chunk.shape[0], acc % ctx.p


def extension_operator(f: SurfaceFunction, method: str = "direct") -> GridFunction:
    """(f dsigma)^v(m) = |P|^-1 sum over xi in P of f(xi) chi(m . xi), on all of F_q^d.

    ``method="direct"`` sums the |P| terms at every m; ``method="transform"``
    pads f into the frequency grid and applies the inverse transform.
    """
    geom = f.geometry
    ctx = geom.ctx
    n = grid_size(ctx, geom.d)
    if method == "transform":
        spread = np.zeros(n, complex)
        spread[geom.grid_index] = f.values * (n / geom.size)
        return fourier_inverse(GridFunction(ctx, geom.d, spread, Measure.NORMALIZED))
    if method != "direct":
        raise ContractError(f"unknown method {method!r}")
    out = np.empty(n, complex)
    coords = grid_coords(ctx, geom.d)
    for lo, hi, phase in _phase_chunks(geom, coords):
        out[lo:hi] = ctx.roots[phase] @ f.values
    return GridFunction(ctx, geom.d, out / geom.size, Measure.COUNTING)


def restriction_operator(g: GridFunction, geom: ParaboloidGeometry) -> SurfaceFunction:
    """g^ restricted to the points of P."""
    if g.measure is not Measure.COUNTING:
        raise ContractError("restriction_operator expects a counting-measure function")
    if g.ctx != geom.ctx or g.d != geom.d:
        raise ContractError("function and paraboloid live in different spaces")
    ghat = fourier_forward(g)
    return SurfaceFunction(geom, ghat.values[geom.grid_index])


def surface_inner(a: SurfaceFunction, b: SurfaceFunction) -> complex:
    return complex(np.vdot(b.values, a.values) / a.geometry.size)


def dsigma_inverse_explicit(geom: ParaboloidGeometry, m, gauss: complex | None = None) -> complex:
    """Closed form of (dsigma)^v(m) through the Gauss sum.

    ``gauss`` overrides G_1; it exists so fault-injection runs can corrupt it.
    """
    ctx = geom.ctx
    m = np.asarray(m, dtype=np.int64)
    if m.shape != (geom.d,):
        raise ContractError(f"m must have {geom.d} coordinates")
    md = int(m[-1])
    if md == 0:
        return 1.0 + 0j if not np.any(m) else 0j
    G1 = gauss_sum(ctx) if gauss is None else gauss
    base = m[:-1]
    norm = 0
    for s in ctx.mul_table[base, base]:
        norm = int(ctx.add(norm, s))
    denom = ctx.neg(ctx.mul(ctx.from_int(4), md))
    arg = int(ctx.div(norm, denom))
    k = geom.d - 1
    return complex(ctx.q ** (-k) * ctx.chi(arg) * int(ctx.eta(md)) ** k * G1**k)


def dsigma_inverse_grid(geom: ParaboloidGeometry, gauss: complex | None = None) -> GridFunction:
    """The closed form evaluated at every m, vectorised."""
    ctx = geom.ctx
    coords = grid_coords(ctx, geom.d)
    base, md = coords[:, :-1], coords[:, -1]
    sq = ctx.mul_table[base, base]
    norm = sq[:, 0]
    for j in range(1, geom.d - 1):
        norm = ctx.add_table[norm, sq[:, j]]
    G1 = gauss_sum(ctx) if gauss is None else gauss
    k = geom.d - 1
    out = np.zeros(coords.shape[0], complex)
    live = md != 0
    denom = ctx.neg_table[ctx.mul_table[ctx.from_int(4), md[live]]]
    arg = ctx.mul_table[norm[live], ctx.inv_table[denom]]
    out[live] = ctx.q ** (-k) * ctx.chi(arg) * ctx.eta_table[md[live]].astype(float) ** k * G1**k
    out[0] = 1.0
    return GridFunction(ctx, geom.d, out, Measure.COUNTING)


# -- isotropic subspaces ------------------------------------------------------


def quadratic_form(ctx: FieldContext, vecs) -> np.ndarray:
    """x_1^2 + ... + x_k^2 for each row of ``vecs``."""
    vecs = np.atleast_2d(np.asarray(vecs, dtype=np.int64))
    sq = ctx.mul_table[vecs, vecs]
    out = sq[:, 0]
    for j in range(1, vecs.shape[1]):
        out = ctx.add_table[out, sq[:, j]]
    return out


def expected_isotropic_exponent(ctx: FieldContext, d: int) -> int:
    """log_q |W| for a maximal subspace W of S_0 in F_q^(d-1), by the case table."""
    k = d - 1
    if k % 2 == 1:
        return (d - 2) // 2
    sign = int(ctx.eta(ctx.neg(1))) ** (k // 2)
    return (d - 1) // 2 if sign == 1 else (d - 3) // 2


def _span(ctx: FieldContext, basis: np.ndarray, length: int) -> np.ndarray:
    if basis.shape[0] == 0:
        return np.zeros((1, length), dtype=np.int64)
    out = []
    for coeffs in itertools.product(range(ctx.q), repeat=basis.shape[0]):
        v = np.zeros(length, dtype=np.int64)
        for c, b in zip(coeffs, basis):
            v = ctx.add_table[v, ctx.mul_table[c, b]]
        out.append(v)
    return np.array(out, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class IsotropicSubspace:
    ctx: FieldContext
    d: int
    basis: np.ndarray  # (k, d-1)

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    @property
    def size(self) -> int:
        return self.ctx.q**self.dimension

    @cached_property
    def elements(self) -> np.ndarray:
        return _span(self.ctx, self.basis, self.d - 1)

    def verify(self) -> None:
        """Raise unless the basis is independent and the span is totally isotropic."""
        elems = self.elements
        if len({tuple(v) for v in elems}) != self.size:
            raise ConsistencyError("basis vectors are linearly dependent")
        if np.any(quadratic_form(self.ctx, elems) != 0):
            raise ConsistencyError("span contains a non-isotropic vector")


def _sum_of_two_squares(ctx: FieldContext, target: int) -> tuple[int, int]:
    sq = ctx.mul_table.diagonal()
    for a in range(ctx.q):
        need = ctx.sub(target, sq[a])
        hits = np.nonzero(sq == need)[0]
        if hits.size:
            return a, int(hits[0])
    raise ConsistencyError(f"{target} is not a sum of two squares")


def maximal_isotropic_subspace(ctx: FieldContext, d: int) -> IsotropicSubspace:
    """A subspace of maximal dimension on which x_1^2 + ... + x_{d-1}^2 vanishes.

    With i^2 = -1, pairs of coordinates give e_j + i e_{j+1}.  Otherwise pick
    a^2 + b^2 = -1; each block of four coordinates carries (1, 0, a, b) and
    (0, 1, b, -a), and a leftover block of three carries (1, a, b).
    """
    if d < 2:
        raise ContractError("d must be >= 2")
    k = d - 1
    basis = []
    i = sqrt_minus_one(ctx)
    if i is not None:
        for j in range(0, k - 1, 2):
            v = [0] * k
            v[j], v[j + 1] = 1, i
            basis.append(v)
    else:
        a, b = _sum_of_two_squares(ctx, int(ctx.neg(1)))
        j = 0
        while j + 4 <= k:
            v1 = [0] * k
            v2 = [0] * k
            v1[j], v1[j + 2], v1[j + 3] = 1, a, b
            v2[j + 1], v2[j + 2], v2[j + 3] = 1, b, int(ctx.neg(a))
            basis += [v1, v2]
            j += 4
        if k - j == 3:
            v = [0] * k
            v[j], v[j + 1], v[j + 2] = 1, a, b
            basis.append(v)
    w = IsotropicSubspace(ctx, d, np.array(basis, dtype=np.int64).reshape(len(basis), k))
    w.verify()
    return w


def exhaustive_isotropic_dimension(ctx: FieldContext, nvars: int) -> int:
    """Largest dimension of a totally isotropic subspace of F_q^nvars, by search.

    Depth-first over normalized isotropic vectors; meant for nvars <= 4.
    """
    if nvars == 0:
        return 0
    vecs = grid_coords(ctx, nvars)[1:]
    iso = vecs[quadratic_form(ctx, vecs) == 0]
    # one representative per line: first nonzero coordinate equal to 1
    lead = np.array([v[np.flatnonzero(v)[0]] for v in iso]) if len(iso) else np.array([])
    iso = iso[lead == 1] if len(iso) else iso

    def bilinear(u, v):
        s = 0
        for x in ctx.mul_table[u, v]:
            s = int(ctx.add(s, x))
        return s

    best = 0

    def extend(chosen, span_set, start):
        nonlocal best
        best = max(best, len(chosen))
        if best == nvars // 2:
            return
        for t in range(start, len(iso)):
            v = iso[t]
            if tuple(v) in span_set:
                continue
            if any(bilinear(v, c) != 0 for c in chosen):
                continue
            new = chosen + [v]
            extend(new, {tuple(x) for x in _span(ctx, np.array(new), nvars)}, t + 1)

    extend([], {tuple([0] * nvars)}, 0)
    return best


def subspace_in_paraboloid(w: IsotropicSubspace) -> np.ndarray:
    """Omega = W x {0} as ``(|W|, d)`` coordinates; every row lies on P."""
    elems = w.elements
    return np.column_stack([elems, np.zeros(len(elems), dtype=np.int64)])


def omega_surface_indices(geom: ParaboloidGeometry, w: IsotropicSubspace) -> np.ndarray:
    """Indices into P of the points of Omega."""
    return np.sort(encode(geom.ctx, w.elements).reshape(-1))


def orthogonal_complement_indices(geom: ParaboloidGeometry, w: IsotropicSubspace) -> np.ndarray:
    """P-indices of base points in W-perp; each such point's W-coset lies on P."""
    ctx = geom.ctx
    base = geom.base
    ok = np.ones(geom.size, dtype=bool)
    for v in w.basis:
        prods = ctx.mul_table[base, v[None, :]]
        s = prods[:, 0]
        for j in range(1, base.shape[1]):
            s = ctx.add_table[s, prods[:, j]]
        ok &= s == 0
    return np.flatnonzero(ok)
