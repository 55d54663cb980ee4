"""Fourier analysis on F_q^d with counting measure (space) and normalized measure (frequency).

A point ``(x_1, ..., x_d)`` is stored at flat index ``x_1 q^(d-1) + ... + x_d``,
so ``values.reshape((q,) * d)[x_1, ..., x_d]`` addresses it directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ContractError, ResourceLimitError
from .field import FieldContext


class Measure(str, Enum):
    COUNTING = "counting"
    NORMALIZED = "normalized"


def check_cap(ctx: FieldContext, npoints: int) -> None:
    if npoints > ctx.grid_cap:
        raise ResourceLimitError(
            f"{npoints} grid points exceeds the cap of {ctx.grid_cap}; raise grid_cap to proceed"
        )


def grid_size(ctx: FieldContext, d: int) -> int:
    if d < 1:
        raise ContractError("dimension must be >= 1")
    size = ctx.q**d
    check_cap(ctx, size)
    return size


def grid_coords(ctx: FieldContext, d: int) -> np.ndarray:
    """All points of F_q^d as an ``(q**d, d)`` integer array in index order."""
    n = grid_size(ctx, d)
    idx = np.arange(n)
    q = ctx.q
    return np.stack([(idx // q ** (d - 1 - j)) % q for j in range(d)], axis=1)


def encode(ctx: FieldContext, coords) -> np.ndarray | int:
    coords = np.asarray(coords)
    d = coords.shape[-1]
    weights = ctx.q ** np.arange(d - 1, -1, -1)
    out = coords @ weights
    return int(out) if np.ndim(out) == 0 else out


def dot(ctx: FieldContext, a, b):
    """m . xi computed in F_q, vectorised over leading axes."""
    a = np.asarray(a)
    b = np.asarray(b)
    prods = ctx.mul_table[a, b]
    out = prods[..., 0]
    for j in range(1, prods.shape[-1]):
        out = ctx.add_table[out, prods[..., j]]
    return out


@dataclass(frozen=True, eq=False)
class GridFunction:
    ctx: FieldContext
    d: int
    values: np.ndarray
    measure: Measure = Measure.COUNTING

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex).reshape(-1)
        if vals.size != grid_size(self.ctx, self.d):
            raise ContractError(f"expected {self.ctx.q ** self.d} values, got {vals.size}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "measure", Measure(self.measure))

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def size(self) -> int:
        return self.values.size

    def cube(self) -> np.ndarray:
        return self.values.reshape((self.ctx.q,) * self.d)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.ctx, self.d, values, self.measure)

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)

    def __getitem__(self, point):
        if np.ndim(point) == 0:
            return self.values[int(point)]
        return self.values[encode(self.ctx, point)]

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zeros(cls, ctx, d, measure=Measure.COUNTING):
        return cls(ctx, d, np.zeros(grid_size(ctx, d), complex), measure)

    @classmethod
    def constant(cls, ctx, d, c=1.0, measure=Measure.COUNTING):
        return cls(ctx, d, np.full(grid_size(ctx, d), c, complex), measure)

    @classmethod
    def delta(cls, ctx, d, point=None, height=1.0, measure=Measure.COUNTING):
        vals = np.zeros(grid_size(ctx, d), complex)
        vals[0 if point is None else encode(ctx, point)] = height
        return cls(ctx, d, vals, measure)

    @classmethod
    def indicator(cls, ctx, d, indices, measure=Measure.COUNTING):
        vals = np.zeros(grid_size(ctx, d), complex)
        vals[np.asarray(list(indices), dtype=np.int64)] = 1.0
        return cls(ctx, d, vals, measure)

    @classmethod
    def random(cls, ctx, d, rng, measure=Measure.COUNTING):
        n = grid_size(ctx, d)
        return cls(ctx, d, rng.standard_normal(n) + 1j * rng.standard_normal(n), measure)

    # -- serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "q": self.ctx.q,
            "p": self.ctx.p,
            "n": self.ctx.n,
            "modulus": list(self.ctx.modulus),
            "d": self.d,
            "measure": self.measure.value,
            "values": [[float(z.real), float(z.imag)] for z in self.values],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "GridFunction":
        if obj.get("surface"):
            raise ContractError("payload describes a SurfaceFunction")
        ctx = context_from_dict(obj)
        vals = np.array([complex(re, im) for re, im in obj["values"]])
        return cls(ctx, int(obj["d"]), vals, Measure(obj["measure"]))

    @classmethod
    def from_json(cls, text: str) -> "GridFunction":
        return cls.from_dict(json.loads(text))


def context_from_dict(obj: dict) -> FieldContext:
    p, n = int(obj["p"]), int(obj["n"])
    if p**n != int(obj["q"]):
        raise ContractError("q does not equal p**n")
    return FieldContext(p, n, tuple(obj.get("modulus") or ()))


def _require(g: GridFunction, measure: Measure, what: str) -> None:
    if g.measure is not measure:
        raise ContractError(f"{what} expects a {measure.value} function, got {g.measure.value}")


def character_matrix(ctx: FieldContext) -> np.ndarray:
    """``C[x, xi] = chi(x xi)`` on F_q."""
    return ctx.chi(ctx.mul_table)


def _apply_axes(cube: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """Contract ``mat[x, xi]`` against every axis of ``cube`` in turn."""
    out = cube
    for axis in range(cube.ndim):
        out = np.moveaxis(np.tensordot(out, mat, axes=([axis], [0])), -1, axis)
    return out


def fourier_forward(g: GridFunction) -> GridFunction:
    """g^(xi) = sum over m of g(m) chi(-m . xi)."""
    _require(g, Measure.COUNTING, "fourier_forward")
    mat = np.conj(character_matrix(g.ctx))
    out = _apply_axes(g.cube(), mat)
    return GridFunction(g.ctx, g.d, out.reshape(-1), Measure.NORMALIZED)


def fourier_inverse(f: GridFunction) -> GridFunction:
    """f^v(m) = q^-d sum over xi of f(xi) chi(xi . m)."""
    _require(f, Measure.NORMALIZED, "fourier_inverse")
    out = _apply_axes(f.cube(), character_matrix(f.ctx)) / f.size
    return GridFunction(f.ctx, f.d, out.reshape(-1), Measure.COUNTING)


def _shift_tables(ctx: FieldContext):
    """``sub[a, b] = a - b`` as an integer table."""
    return ctx.add_table[:, ctx.neg_table]


def convolve(a: GridFunction, b: GridFunction) -> GridFunction:
    """Direct convolution: sum over the support of ``b`` of shifted copies of ``a``.

    Counting: (a*b)(n) = sum_m a(n-m) b(m).  Normalized: the same sum divided by q^d.
    """
    if a.ctx != b.ctx or a.d != b.d:
        raise ContractError("convolution operands live on different grids")
    if a.measure is not b.measure:
        raise ContractError("convolution operands carry different measures")
    ctx, d = a.ctx, a.d
    coords = grid_coords(ctx, d)
    sub = _shift_tables(ctx)
    acube = a.cube()
    out = np.zeros((ctx.q,) * d, complex)
    for m in b.support():
        shifted = acube
        for axis, mj in enumerate(coords[m]):
            # shifted[..., n_j, ...] = a[..., n_j - m_j, ...]
            shifted = np.take(shifted, sub[:, mj], axis=axis)
        out += b.values[m] * shifted
    if a.measure is Measure.NORMALIZED:
        out /= a.size
    return GridFunction(ctx, d, out.reshape(-1), a.measure)


def lp_norm(h: GridFunction, p) -> float:
    """L^p norm under the function's own measure; ``p`` may be ``inf``."""
    weight = 1.0 if h.measure is Measure.COUNTING else 1.0 / h.size
    return weighted_lp_norm(h.values, p, weight)


def weighted_lp_norm(values, p, weight: float = 1.0) -> float:
    """(weight * sum |v|^p)^(1/p), or max |v| when p is infinite."""
    p = float(p)
    if not p >= 1:
        raise ContractError(f"norm exponent must be >= 1, got {p}")
    mags = np.abs(np.asarray(values))
    if mags.size == 0:
        return 0.0
    if np.isinf(p):
        return float(mags.max())
    top = mags.max()
    if top == 0:
        return 0.0
    # scale first; large p overflows otherwise
    return float(top * (weight * np.sum((mags / top) ** p)) ** (1.0 / p))


def inner(a: GridFunction, b: GridFunction) -> complex:
    """<a, b> = integral of a * conj(b) under the shared measure."""
    if a.measure is not b.measure or a.ctx != b.ctx or a.d != b.d:
        raise ContractError("inner product operands differ in grid or measure")
    s = np.vdot(b.values, a.values)
    return complex(s if a.measure is Measure.COUNTING else s / a.size)
