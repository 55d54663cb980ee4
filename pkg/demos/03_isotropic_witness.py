"""
Isotropic subspaces as witnesses
================================

The indicator of Omega = W x {0} extends to a multiple of an indicator, so its
extension ratio is an exact power of q.  A positive exponent rules out the
(p, r) pair uniformly in q.
"""

from ffrestrict import build_paraboloid, field
from ffrestrict.norms import fit_loglog, omega_witness_ratio, predicted_witness_slope

d = 5
for p, r in [("5/2", "2"), ("5/2", "5/2"), ("5/2", "4")]:
    pts, k = [], None
    for q in (3, 7, 11):
        ratio, k = omega_witness_ratio(build_paraboloid(field(q), d), p, r)
        pts.append((q, ratio))
    slope, _, _ = fit_loglog(pts)
    print(f"(p, r) = ({p}, {r}): k={k}, fitted slope {slope:+.4f}, "
          f"predicted {float(predicted_witness_slope(d, k, p, r)):+.4f}")
