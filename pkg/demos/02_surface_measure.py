"""
Extension of the surface measure
================================

Compares the closed form of (dsigma)^v with the direct sum over the paraboloid
and checks the L^2 identity ||(f dsigma)^v||_2 = sqrt(q) ||f||_2.
"""

import numpy as np

from ffrestrict import SurfaceFunction, build_paraboloid, field
from ffrestrict.paraboloid import dsigma_inverse_grid, extension_operator, surface_lp_norm
from ffrestrict.transform import lp_norm

for d, q in [(2, 7), (3, 5), (4, 3)]:
    geom = build_paraboloid(field(q), d)
    direct = extension_operator(SurfaceFunction.constant(geom), "direct").values
    closed = dsigma_inverse_grid(geom).values
    nz = np.abs(direct[1:]) > 1e-9
    print(f"d={d} q={q}: |P|={geom.size}, max gap {np.max(np.abs(direct - closed)):.1e}, "
          f"nonzero |values| = {np.unique(np.round(np.abs(direct[1:][nz]), 12))}")

rng = np.random.default_rng(0)
geom = build_paraboloid(field(5), 3)
f = SurfaceFunction(geom, rng.standard_normal(geom.size) + 1j * rng.standard_normal(geom.size))
print("L2 ratio:", lp_norm(extension_operator(f), 2) / surface_lp_norm(f, 2), "sqrt(5) =", 5**0.5)
