"""
Finite fields and the Gauss sum
===============================

Builds a few fields, checks that |G_1|^2 = q, and shows where -1 is a square.
"""

from ffrestrict.field import field, gauss_sum, is_minus_one_square

for q in (3, 5, 7, 9, 11, 13, 25, 27):
    ctx = field(q)
    g = gauss_sum(ctx)
    print(f"q={q:3d}  G_1={g.real:+.4f}{g.imag:+.4f}i  |G_1|^2={abs(g) ** 2:.6f}  "
          f"-1 square: {is_minus_one_square(ctx)}")

# F_9 = F_3[t]/(t^2 + 1); the element t is encoded as 3 (digits low to high)
f9 = field(9)
print("t * t =", f9.mul(3, 3), "(the encoding of -1)")
