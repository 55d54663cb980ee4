"""Arithmetic in F_q for odd prime powers q, plus its characters.

Elements are integers in ``[0, q)``.  For ``q = p**n`` the base-p digits of an
element are the coefficients (lowest degree first) of a polynomial in ``t``
reduced modulo a monic irreducible of degree ``n``.  Every operation is a
lookup in tables built once at construction, so vectorised numpy indexing
works directly on arrays of elements.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from dataclasses import field as dc_field
from functools import lru_cache

import numpy as np

from .errors import ContractError

DEFAULT_GRID_CAP = 2**26

# Lowest-degree-first coefficients including the leading 1.
BUILTIN_MODULI = {
    9: (1, 0, 1),  # t^2 + 1
    25: (2, 0, 1),  # t^2 + 2
    27: (1, 2, 0, 1),  # t^3 + 2t + 1
    49: (1, 0, 1),  # t^2 + 1
    121: (1, 0, 1),  # t^2 + 1
    125: (2, 3, 0, 1),  # t^3 + 3t + 2
    169: (2, 0, 1),  # t^2 + 2
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for k in range(2, math.isqrt(n) + 1):
        if n % k == 0:
            return False
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, n)`` with ``q == p**n``; raise if q is not a prime power."""
    for p in range(2, q + 1):
        if q % p == 0:
            n, rest = 0, q
            while rest % p == 0:
                rest //= p
                n += 1
            if rest != 1 or not is_prime(p):
                break
            return p, n
    raise ContractError(f"{q} is not a prime power")


# -- polynomials over F_p, coefficient tuples lowest degree first -----------


def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p):
    a = _poly_trim(a)
    m = _poly_trim(m)
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        a = _poly_trim(a)
    return a


def is_irreducible(modulus, p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    m = _poly_trim(modulus)
    n = len(m) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    for deg in range(1, n // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            if not _poly_mod(m, list(low) + [1], p):
                return False
    return True


def find_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree ``n`` over F_p."""
    for idx in range(p**n):
        low = [(idx // p**i) % p for i in range(n)]
        cand = tuple(low + [1])
        if is_irreducible(cand, p):
            return cand
    raise ContractError(f"no irreducible polynomial of degree {n} over F_{p}")


@dataclass(frozen=True)
class FieldContext:
    """The field F_q together with its lookup tables.

    ``modulus`` lists the coefficients of the defining polynomial, lowest
    degree first and including the leading 1; it is empty for prime fields.
    """

    p: int
    n: int = 1
    modulus: tuple[int, ...] = ()
    grid_cap: int = DEFAULT_GRID_CAP
    q: int = dc_field(init=False)

    def __post_init__(self):
        if self.p == 2 or not is_prime(self.p):
            raise ContractError(f"p must be an odd prime, got {self.p}")
        if self.n < 1:
            raise ContractError("extension degree must be >= 1")
        object.__setattr__(self, "q", self.p**self.n)
        if self.n == 1:
            if self.modulus:
                raise ContractError("prime fields take no modulus")
        else:
            mod = tuple(int(c) % self.p for c in self.modulus)
            if len(mod) != self.n + 1 or mod[-1] != 1:
                raise ContractError(f"modulus must be monic of degree {self.n}")
            if not is_irreducible(mod, self.p):
                raise ContractError(f"modulus {mod} is reducible over F_{self.p}")
            object.__setattr__(self, "modulus", mod)
        _build_tables(self)

    @classmethod
    def of_order(cls, q: int, modulus=None, grid_cap: int = DEFAULT_GRID_CAP) -> "FieldContext":
        p, n = prime_power(q)
        if n == 1:
            return cls(p, 1, (), grid_cap)
        if modulus is None:
            modulus = BUILTIN_MODULI.get(q) or find_irreducible(p, n)
        return cls(p, n, tuple(modulus), grid_cap)

    def __repr__(self):
        if self.n == 1:
            return f"FieldContext(q={self.q})"
        return f"FieldContext(q={self.q}, modulus={self.modulus})"

    # the dataclass eq/hash would compare the numpy tables
    def __eq__(self, other):
        if not isinstance(other, FieldContext):
            return NotImplemented
        return (self.p, self.n, self.modulus) == (other.p, other.n, other.modulus)

    def __hash__(self):
        return hash((self.p, self.n, self.modulus))

    @property
    def is_prime_field(self) -> bool:
        return self.n == 1

    # -- scalar arithmetic -------------------------------------------------

    def add(self, a, b):
        return self.add_table[a, b]

    def sub(self, a, b):
        return self.add_table[a, self.neg_table[b]]

    def neg(self, a):
        return self.neg_table[a]

    def mul(self, a, b):
        return self.mul_table[a, b]

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("0 has no inverse in F_q")
        return self.inv_table[a]

    def div(self, a, b):
        return self.mul_table[a, self.inv(b)]

    def power(self, a: int, e: int) -> int:
        result, base = 1, int(a)
        while e:
            if e & 1:
                result = int(self.mul_table[result, base])
            base = int(self.mul_table[base, base])
            e >>= 1
        return result

    def trace(self, a):
        """Absolute trace F_q -> F_p, as an integer in [0, p)."""
        return self.trace_table[a]

    def from_int(self, k: int) -> int:
        """Image of the integer ``k`` under Z -> F_p -> F_q."""
        return k % self.p

    def elements(self) -> range:
        return range(self.q)

    # -- characters ----------------------------------------------------------

    def chi(self, a):
        """Canonical additive character exp(2 pi i Tr(a) / p)."""
        return self.roots[self.trace_table[a]]

    def eta(self, a):
        """Quadratic character: +1 on nonzero squares, -1 on nonsquares, 0 at 0."""
        return self.eta_table[a]


def _build_tables(ctx: FieldContext) -> None:
    p, n, q = ctx.p, ctx.n, ctx.q
    idx = np.arange(q)
    digits = np.stack([(idx // p**i) % p for i in range(n)], axis=1)  # (q, n)
    weights = p ** np.arange(n)

    add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
    neg = ((-digits) % p) @ weights

    if n == 1:
        mul = np.outer(idx, idx) % p
    else:
        # reduction of t^k for k < 2n-1, as digit vectors
        red = []
        for k in range(2 * n - 1):
            mono = [0] * k + [1]
            r = _poly_mod(mono, ctx.modulus, p)
            red.append(r + [0] * (n - len(r)))
        red = np.array(red)  # (2n-1, n)
        prod = np.zeros((q, q, 2 * n - 1), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                prod[:, :, i + j] += np.outer(digits[:, i], digits[:, j])
        mul = ((prod % p) @ red % p) @ weights

    inv = np.zeros(q, dtype=np.int64)
    rows, cols = np.nonzero(mul == 1)
    inv[rows] = cols

    # Tr(a) = a + a^p + ... + a^(p^(n-1)); Frobenius x -> x^p applied repeatedly
    frob = idx.copy()
    for _ in range(p - 1):
        frob = mul[frob, idx]
    tr = idx.copy()
    cur = idx.copy()
    for _ in range(n - 1):
        cur = frob[cur]
        tr = add[tr, cur]
    if np.any(tr >= p):
        raise ContractError("trace left the prime subfield; modulus is not irreducible")

    # eta via a^((q-1)/2)
    half = (q - 1) // 2
    powv = np.ones(q, dtype=np.int64)
    base = idx.copy()
    e = half
    while e:
        if e & 1:
            powv = mul[powv, base]
        base = mul[base, base]
        e >>= 1
    eta = np.where(powv == 1, 1, np.where(powv == 0, 0, -1)).astype(np.int64)
    eta[0] = 0

    roots = np.exp(2j * np.pi * np.arange(p) / p)

    for name, arr in (
        ("add_table", add),
        ("neg_table", neg),
        ("mul_table", mul),
        ("inv_table", inv),
        ("trace_table", tr),
        ("eta_table", eta),
        ("roots", roots),
    ):
        arr = np.asarray(arr)
        arr.setflags(write=False)
        object.__setattr__(ctx, name, arr)


@lru_cache(maxsize=None)
def field(q: int) -> FieldContext:
    """Cached FieldContext for ``q`` using the built-in modulus table."""
    return FieldContext.of_order(q)


def field_arith(ctx: FieldContext, op: str, a: int, b: int | None = None) -> int:
    """Dispatch one of ``add, sub, mul, inv, neg`` on scalar elements."""
    for x in (a, b):
        if x is not None and not 0 <= int(x) < ctx.q:
            raise ContractError(f"{x} is not an element of F_{ctx.q}")
    if op == "inv":
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in F_q")
        return int(ctx.inv_table[a])
    if op == "neg":
        return int(ctx.neg_table[a])
    if b is None:
        raise ContractError(f"{op} needs two operands")
    if op == "add":
        return int(ctx.add(a, b))
    if op == "sub":
        return int(ctx.sub(a, b))
    if op == "mul":
        return int(ctx.mul(a, b))
    raise ContractError(f"unknown operation {op!r}")


def additive_character(ctx: FieldContext, x: int) -> complex:
    return complex(ctx.chi(x))


def quadratic_character(ctx: FieldContext, x: int) -> int:
    return int(ctx.eta(x))


def gauss_sum(ctx: FieldContext) -> complex:
    """G_1 = sum over s != 0 of eta(s) chi(s); its modulus is sqrt(q)."""
    s = np.arange(1, ctx.q)
    return complex(np.sum(ctx.eta_table[s] * ctx.chi(s)))


def is_minus_one_square(ctx: FieldContext) -> bool:
    return quadratic_character(ctx, ctx.neg(1)) == 1


def sqrt_minus_one(ctx: FieldContext) -> int | None:
    """Some i with i*i == -1, or None when -1 is a nonsquare."""
    minus_one = int(ctx.neg(1))
    hits = np.nonzero(ctx.mul_table.diagonal() == minus_one)[0]
    return int(hits[0]) if hits.size else None
