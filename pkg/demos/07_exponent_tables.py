"""
Exponent tables
===============

Prints the conjectured, best known and Stein-Tomas endpoints by dimension and
field class, then the full tables.
"""

from ffrestrict.exponents import exponent_profile_for, render_markdown

for d in range(2, 10):
    for square in (True, False):
        prof = exponent_profile_for(d, square)
        print(f"d={d} -1 square={square!s:5s} {prof.field_class.value:22s} "
              f"conjectured {str(prof.conjectured_r):>5s}  best {str(prof.best_known_r):>9s}  "
              f"Stein-Tomas {prof.stein_tomas_r}")
print()
print(render_markdown())
