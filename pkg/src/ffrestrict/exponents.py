"""Exact exponent bookkeeping for the paraboloid extension problem.

Exponents are ``Fraction`` values or ``math.inf``.  Everything here is
rational arithmetic; no field computation beyond asking whether -1 is a
square.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Union

from .errors import ContractError
from .field import FieldContext, is_minus_one_square

Exponent = Union[Fraction, float]


def exponent(x) -> Exponent:
    """Coerce ints, fractions, strings like ``"18/5"`` or ``"inf"`` to an exponent."""
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "infinity", "oo"):
            return math.inf
        x = Fraction(s)
    elif isinstance(x, float):
        if math.isinf(x):
            return math.inf
        x = Fraction(x).limit_denominator(10**6)
    else:
        x = Fraction(x)
    if x < 1:
        raise ContractError(f"exponents must be >= 1, got {x}")
    return x


def exponent_str(x: Exponent) -> str:
    return "inf" if x == math.inf else str(x)


def conjugate(x: Exponent) -> Exponent:
    """Hoelder conjugate x / (x - 1)."""
    x = exponent(x)
    if x == 1:
        return math.inf
    if x == math.inf:
        return Fraction(1)
    return x / (x - 1)


@dataclass(frozen=True)
class NecessaryConstraints:
    """r >= 2d/(d-1) and r >= p(d-k)/((p-1)(d-1-k)) for a k-dimensional subspace in P."""

    d: int
    k: int

    @property
    def tomas_floor(self) -> Fraction:
        return Fraction(2 * self.d, self.d - 1)

    def subspace_floor(self, p) -> Exponent:
        p = exponent(p)
        if p == 1:
            return math.inf
        if p == math.inf:
            return Fraction(self.d - self.k, self.d - 1 - self.k)
        return p * (self.d - self.k) / ((p - 1) * (self.d - 1 - self.k))

    def min_r(self, p) -> Exponent:
        return max(self.tomas_floor, self.subspace_floor(p))

    def admits(self, p, r) -> bool:
        return exponent(r) >= self.min_r(p)


def necessary_exponents(d: int, k: int) -> NecessaryConstraints:
    if d < 2:
        raise ContractError("d must be >= 2")
    if k == d - 1:
        raise ContractError("k = d - 1 makes the subspace condition degenerate")
    if not 0 <= k <= d - 2:
        raise ContractError(f"k must lie in [0, {d - 2}]")
    return NecessaryConstraints(d, k)


class FieldClass(str, Enum):
    EVEN_D = "EvenD"
    D3_MOD4_MINUS_NONSQUARE = "D3Mod4MinusNonSquare"
    D1_MOD4 = "D1Mod4"
    ODD_D_MINUS_SQUARE = "OddDMinusSquare"


def classify(d: int, minus_one_square: bool) -> FieldClass:
    """Case split by the parity of d, d mod 4, and whether -1 is a square.

    d = 1 mod 4 is reported as D1Mod4 whatever the field; its exponents agree
    with the odd-d / square case anyway.
    """
    if d < 2:
        raise ContractError("d must be >= 2")
    if d % 2 == 0:
        return FieldClass.EVEN_D
    if d % 4 == 1:
        return FieldClass.D1_MOD4
    if minus_one_square:
        return FieldClass.ODD_D_MINUS_SQUARE
    return FieldClass.D3_MOD4_MINUS_NONSQUARE


def stein_tomas_r(d: int) -> Fraction:
    return Fraction(2 * d + 2, d - 1)


def lewko_r(d: int) -> Fraction:
    """2d^2 / (d^2 - 2d + 2)."""
    return Fraction(2 * d * d, d * d - 2 * d + 2)


def improved_even_r(d: int) -> Fraction:
    """(6d + 8) / (3d - 2), the open endpoint for even d >= 6."""
    return Fraction(6 * d + 8, 3 * d - 2)


def improved_three_mod_four_r(d: int) -> Fraction:
    """(6d + 10) / (3d - 1), the open endpoint for d = 3 mod 4, d >= 7, -1 a nonsquare."""
    return Fraction(6 * d + 10, 3 * d - 1)


def conjectured_r(d: int, cls: FieldClass) -> Fraction:
    if cls is FieldClass.EVEN_D:
        return Fraction(2 * d + 4, d)
    if cls is FieldClass.D3_MOD4_MINUS_NONSQUARE:
        return Fraction(2 * d + 6, d + 1)
    return stein_tomas_r(d)


def subspace_exponent(d: int, cls: FieldClass) -> int:
    """log_q |Omega| for the largest subspace of P through the origin."""
    if cls is FieldClass.EVEN_D:
        return (d - 2) // 2
    if cls is FieldClass.D3_MOD4_MINUS_NONSQUARE:
        return (d - 3) // 2
    return (d - 1) // 2


def necessary_corner(d: int, cls: FieldClass) -> tuple[Fraction, Fraction]:
    """The critical vertex (1/p, 1/r) of the necessary region."""
    y = Fraction(d - 1, 2 * d)
    if cls is FieldClass.EVEN_D:
        return Fraction(d * d - d + 2, 2 * d * d), y
    if cls is FieldClass.D3_MOD4_MINUS_NONSQUARE:
        return Fraction(d * d + 3, 2 * d * d + 2 * d), y
    return y, y


@dataclass(frozen=True)
class ExponentProfile:
    d: int
    field_class: FieldClass
    corner: tuple[Fraction, Fraction]
    conjectured_r: Fraction
    stein_tomas_r: Fraction
    best_known_r: Fraction
    best_known_open: bool
    best_known_source: str
    sharp: bool
    subspace_dim: int

    @property
    def corner_exponents(self) -> tuple[Fraction, Fraction]:
        """The corner as (p, r) instead of reciprocals."""
        return 1 / self.corner[0], 1 / self.corner[1]

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "field_class": self.field_class.value,
            "corner": [str(c) for c in self.corner],
            "conjectured_r": str(self.conjectured_r),
            "stein_tomas_r": str(self.stein_tomas_r),
            "best_known_r": str(self.best_known_r),
            "best_known_open": self.best_known_open,
            "best_known_source": self.best_known_source,
            "sharp": self.sharp,
            "subspace_dim": self.subspace_dim,
        }


def exponent_profile_for(d: int, minus_one_square: bool, q_prime: bool = True) -> ExponentProfile:
    cls = classify(d, minus_one_square)
    st = stein_tomas_r(d)
    sharp = False
    if cls is FieldClass.EVEN_D:
        if d == 2:
            best, is_open, src, sharp = Fraction(4), False, "Mockenhaupt-Tao (solution)", True
        elif d == 4:
            best, is_open, src = lewko_r(d), False, "A. Lewko-M. Lewko"
        else:
            best, is_open, src = improved_even_r(d), True, "improved L2 estimate, even d"
    elif cls is FieldClass.D3_MOD4_MINUS_NONSQUARE:
        if d == 3:
            if q_prime:
                best, is_open, src = Fraction(18, 5) - Fraction(1, 1035), True, "M. Lewko (prime q)"
            else:
                best, is_open, src = Fraction(18, 5), False, "M. Lewko (18/5 - eps, eps unspecified)"
        else:
            best, is_open, src = improved_three_mod_four_r(d), True, "improved L2 estimate, d = 3 mod 4"
    else:
        best, is_open, src, sharp = st, False, "Mockenhaupt-Tao (Stein-Tomas)", True
    return ExponentProfile(
        d=d,
        field_class=cls,
        corner=necessary_corner(d, cls),
        conjectured_r=conjectured_r(d, cls),
        stein_tomas_r=st,
        best_known_r=best,
        best_known_open=is_open,
        best_known_source=src,
        sharp=sharp,
        subspace_dim=subspace_exponent(d, cls),
    )


def exponent_profile(ctx: FieldContext, d: int) -> ExponentProfile:
    return exponent_profile_for(d, is_minus_one_square(ctx), ctx.is_prime_field)


# -- progress tables -------------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    p: str
    r: str
    source: str
    note: str = ""
    p_value: Fraction | None = None
    r_value: Fraction | None = None


def _row(p, r, source, note="", p_rel="", r_rel=""):
    pv = Fraction(p) if not isinstance(p, str) else None
    rv = Fraction(r) if not isinstance(r, str) else None
    ps = p if isinstance(p, str) else p_rel + str(Fraction(p))
    rs = r if isinstance(r, str) else r_rel + str(Fraction(r))
    return TableRow(ps, rs, source, note, pv, rv)


MT = "Mockenhaupt-Tao"
IK = "Iosevich-Koh"
LL = "A. Lewko-M. Lewko"
ML = "M. Lewko"


def table_rows(d: int, cls: FieldClass, q_prime: bool = True) -> list[TableRow]:
    """Known and conjectured (p, r) with R*(p -> r) bounded, instantiated at dimension d."""
    st = stein_tomas_r(d)
    if cls is FieldClass.EVEN_D and d == 2:
        return [_row(2, 4, MT, "S-T; solution")]
    if d == 3 and cls is FieldClass.ODD_D_MINUS_SQUARE:
        return [
            _row(2, 4, MT, "S-T; sharp"),
            _row(Fraction(9, 4), Fraction(18, 5), ML, "sharp"),
            _row("(18-5e)/(8-5e)", "18/5-e", ML, "sharp; some e>0"),
            _row(3, 3, "", "conjectured"),
        ]
    if d == 3 and cls is FieldClass.D3_MOD4_MINUS_NONSQUARE:
        if not q_prime:
            return [
                _row(2, "18/5-e", ML, "some e>0"),
                _row(2, 3, "", "conjectured"),
            ]
        return [
            _row(2, Fraction(18, 5), MT, "", r_rel=">"),
            _row(Fraction(8, 5), 4, MT, "", p_rel=">"),
            _row(2, Fraction(18, 5), LL),
            _row(Fraction(8, 5), 4, LL, "sharp"),
            _row(2, Fraction(18, 5) - Fraction(1, 1035), ML, "", r_rel=">"),
            _row(2, 3, "", "conjectured"),
        ]
    if cls is FieldClass.EVEN_D:
        return [
            _row(2, st, MT, "S-T"),
            _row(2, lewko_r(d), IK, "", r_rel=">"),
            _row(Fraction(4 * d, 3 * d - 2), 4, IK, "", p_rel=">"),
            _row(2, lewko_r(d), LL),
            _row(Fraction(4 * d, 3 * d - 2), 4, LL, "sharp"),
            _row(2, improved_even_r(d), "improved L2 estimate", "", r_rel=">"),
            _row(Fraction(2 * d * d, d * d - d + 2), Fraction(2 * d, d - 1), "", "conjectured"),
            _row(2, Fraction(2 * d + 4, d), "", "conjectured best r for p=2"),
        ]
    if cls is FieldClass.ODD_D_MINUS_SQUARE:
        return [
            _row(2, st, MT, "S-T; sharp"),
            _row(st, f"{st}-e_d", ML, "some e_d>0"),
            _row(Fraction(2 * d, d - 1), Fraction(2 * d, d - 1), "", "conjectured"),
        ]
    if cls is FieldClass.D1_MOD4:
        return [
            _row(2, st, MT, "S-T; sharp"),
            _row(Fraction(2 * d, d - 1), Fraction(2 * d, d - 1), "", "conjectured"),
        ]
    return [
        _row(2, st, MT, "S-T"),
        _row(2, lewko_r(d), IK, "", r_rel=">"),
        _row(Fraction(4 * d, 3 * d - 2), 4, IK, "", p_rel=">"),
        _row(2, lewko_r(d), LL),
        _row(Fraction(4 * d, 3 * d - 2), 4, LL),
        _row(2, improved_three_mod_four_r(d), "improved L2 estimate", "", r_rel=">"),
        _row(Fraction(2 * d * d + 2 * d, d * d + 3), Fraction(2 * d, d - 1), "", "conjectured"),
        _row(2, Fraction(2 * d + 6, d + 1), "", "conjectured best r for p=2"),
    ]


CLASS_LABELS = {
    FieldClass.EVEN_D: "d even, general q",
    FieldClass.D3_MOD4_MINUS_NONSQUARE: "d = 3 mod 4, -1 not a square",
    FieldClass.D1_MOD4: "d = 1 mod 4, -1 not a square",
    FieldClass.ODD_D_MINUS_SQUARE: "d odd, -1 a square",
}


def table_cells(dims=(2, 3, 4, 5, 6, 7)) -> list[tuple[int, FieldClass, bool]]:
    """Every (d, class, prime-q flag) combination the tables distinguish."""
    cells = []
    for d in dims:
        if d % 2 == 0:
            cells.append((d, FieldClass.EVEN_D, True))
            continue
        cells.append((d, FieldClass.ODD_D_MINUS_SQUARE, True))
        if d % 4 == 1:
            cells.append((d, FieldClass.D1_MOD4, True))
        else:
            cells.append((d, FieldClass.D3_MOD4_MINUS_NONSQUARE, True))
            if d == 3:
                cells.append((d, FieldClass.D3_MOD4_MINUS_NONSQUARE, False))
    return cells


def _cell_label(d, cls, q_prime):
    label = CLASS_LABELS[cls]
    if d == 3 and cls is FieldClass.D3_MOD4_MINUS_NONSQUARE:
        label += ", prime q" if q_prime else ", general q"
    return label


def render_markdown(dims=(2, 3, 4, 5, 6, 7)) -> str:
    lines = ["| d | field | p | r | source | note |", "|---|---|---|---|---|---|"]
    for d, cls, q_prime in table_cells(dims):
        for row in table_rows(d, cls, q_prime):
            lines.append(
                f"| {d} | {_cell_label(d, cls, q_prime)} | {row.p} | {row.r} | {row.source} | {row.note} |"
            )
    return "\n".join(lines) + "\n"


def render_csv(dims=(2, 3, 4, 5, 6, 7)) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["d", "field", "p", "r", "source", "note"])
    for d, cls, q_prime in table_cells(dims):
        for row in table_rows(d, cls, q_prime):
            w.writerow([d, _cell_label(d, cls, q_prime), row.p, row.r, row.source, row.note])
    return buf.getvalue()
