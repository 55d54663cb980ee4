"""
Regular functions, slices and the L^2 chain
===========================================

Decomposes a function into regular pieces, lifts slices onto the paraboloid,
and checks the duality identity, the slice bound and the L^2 bounds.
"""

import numpy as np

from ffrestrict import field
from ffrestrict.machinery import (
    l2_restriction_bounds,
    random_regular_function,
    regular_decomposition,
    verify_duality_identity,
    verify_slice_inequality,
)
from ffrestrict.transform import GridFunction

rng = np.random.default_rng(1)
ctx = field(5)

g = GridFunction.random(ctx, 3, rng)
dec = regular_decomposition(g)
print(f"{len(dec.pieces)} regular pieces, reconstruction error "
      f"{np.max(np.abs(dec.reconstruct() - g.values)):.1e}")
rep = verify_duality_identity(g)
print(f"duality: {rep.lhs:.6f} vs {rep.rhs:.6f}")

h = random_regular_function(ctx, 3, rng)
for rep in verify_slice_inequality(h, "4"):
    print(f"{rep.check:17s} {rep.params}  lhs {rep.lhs:.4f}  rhs {rep.rhs:.4f}  pass {rep.passed}")
bounds = l2_restriction_bounds(h)
for c in bounds.checks:
    print(f"{c.check}: {c.lhs:.4f} <= {c.rhs:.4f}")
