"""
Additive energy on the paraboloid
=================================

Counts x + y = z + w quadruples two ways and probes the energy bound with a
greedy extremizer search.
"""

from ffrestrict import PointSubset, additive_energy, build_paraboloid, field
from ffrestrict.energy import energy_extremizer_search
from ffrestrict.paraboloid import maximal_isotropic_subspace, omega_surface_indices

for q in (3, 5, 7):
    E = PointSubset.full(build_paraboloid(field(q), 2))
    print(f"full parabola q={q}: energy {additive_energy(E)} = 2q^2 - q = {2 * q * q - q}")

g5 = build_paraboloid(field(3), 5)
omega = PointSubset(g5, omega_surface_indices(g5, maximal_isotropic_subspace(g5.ctx, 5)))
print(f"Omega in d=5, q=3: |Omega|={len(omega)}, energy {additive_energy(omega)} = |Omega|^3")

g4 = build_paraboloid(field(5), 4)
for size in (9, 27, 81):
    _, rep = energy_extremizer_search(g4, size, trials=8, seed=0)
    print(f"d=4 q=5 |E|={size}: energy {rep.energy}, in window {rep.in_window}, "
          f"ratio to q^(1/2)|E|^(5/2) = {rep.ratios['corollary']:.3f}")
