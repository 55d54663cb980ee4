import json
import math

import numpy as np
import pytest

from ffrestrict.energy import (
    PointSubset,
    additive_energy,
    energy_bound_report,
    energy_bounds,
    energy_class,
    energy_extremizer_search,
    max_ratio,
)
from ffrestrict.errors import ContractError, ResourceLimitError
from ffrestrict.field import field
from ffrestrict.paraboloid import build_paraboloid, maximal_isotropic_subspace, omega_surface_indices
from oracles import SlowField, slow_energy


def geom(q, d):
    return build_paraboloid(field(q), d)


def slow(q):
    ctx = field(q)
    return SlowField(ctx.p, ctx.modulus)


def test_single_point():
    E = PointSubset(geom(5, 3), [7])
    assert additive_energy(E) == additive_energy(E, "convolution") == 1


def test_two_points_give_six():
    E = PointSubset(geom(5, 3), [3, 11])
    assert slow_energy(slow(5), [tuple(p) for p in E.points()]) == 6
    assert additive_energy(E) == 6


@pytest.mark.parametrize("q", (3, 5, 7))
def test_full_parabola_d2(q):
    E = PointSubset.full(geom(q, 2))
    brute = slow_energy(slow(q), [tuple(p) for p in E.points()])
    assert brute == 2 * q * q - q
    assert additive_energy(E, "quadruple") == additive_energy(E, "convolution") == brute


def test_full_parabola_d2_q3_is_15():
    assert additive_energy(PointSubset.full(geom(3, 2))) == 15


def test_omega_energy_is_cube():
    g = geom(3, 5)
    omega = omega_surface_indices(g, maximal_isotropic_subspace(g.ctx, 5))
    E = PointSubset(g, omega)
    assert len(E) == 9
    assert additive_energy(E, "quadruple") == additive_energy(E, "convolution") == 729


@pytest.mark.parametrize("d,q", [(d, q) for d in (2, 3, 4) for q in (3, 5)])
def test_methods_agree_on_random_subsets(d, q):
    g = geom(q, d)
    rng = np.random.default_rng(d * 100 + q)
    for _ in range(100):
        size = int(rng.integers(1, g.size + 1))
        E = PointSubset(g, rng.choice(g.size, size, replace=False))
        e = additive_energy(E, "quadruple")
        assert e == additive_energy(E, "convolution")
        assert len(E) ** 2 <= e <= len(E) ** 3


@pytest.mark.parametrize("d,q", [(2, 5), (3, 3)])
def test_small_random_subsets_match_brute_force(d, q):
    g = geom(q, d)
    F = slow(q)
    rng = np.random.default_rng(1)
    for _ in range(5):
        E = PointSubset(g, rng.choice(g.size, min(g.size, 6), replace=False))
        assert additive_energy(E) == slow_energy(F, [tuple(p) for p in E.points()])


def test_monotone_under_inclusion():
    g = geom(3, 3)
    rng = np.random.default_rng(5)
    for _ in range(30):
        big = rng.choice(g.size, 7, replace=False)
        small = big[: int(rng.integers(1, 7))]
        assert additive_energy(PointSubset(g, small)) <= additive_energy(PointSubset(g, big))


def test_subset_validation():
    g = geom(3, 2)
    with pytest.raises(ContractError):
        PointSubset(g, [0, 0])
    with pytest.raises(ContractError):
        PointSubset(g, [3])
    with pytest.raises(ContractError):
        additive_energy(PointSubset(g, [0]), "fft")


def test_quadruple_size_cap():
    g = geom(3, 7)  # |P| = 729
    with pytest.raises(ResourceLimitError):
        additive_energy(PointSubset.full(g), "quadruple")


def test_report_full_p_d4_q3():
    g = geom(3, 4)
    rep = energy_bound_report(PointSubset.full(g))
    assert rep.regime == "even" and rep.in_window
    assert rep.bounds["corollary"] == pytest.approx(math.sqrt(3) * 27**2.5)
    assert rep.bounds["cube"] == 27**3
    assert rep.ratios["corollary"] == pytest.approx(rep.energy / rep.bounds["corollary"])
    obj = json.loads(rep.to_json())
    assert {"d", "q", "size", "energy", "bounds", "ratios", "regime"} <= set(obj)
    assert set(obj["bounds"]) == {"cube", "mixed", "corollary"}


def test_report_d2_has_no_regime():
    rep = energy_bound_report(PointSubset(geom(5, 2), [0, 1, 2]))
    assert rep.regime == "none" and rep.bounds["corollary"] is None and not rep.in_window


def test_report_single_point():
    rep = energy_bound_report(PointSubset(geom(3, 4), [5]))
    assert rep.energy == 1 and rep.ratios["cube"] == 1


def test_report_empty_rejected():
    with pytest.raises(ContractError):
        energy_bound_report(PointSubset(geom(3, 2), []))


def test_energy_classes():
    assert energy_class(geom(3, 4)) == "even"
    assert energy_class(geom(3, 7)) == "three_mod_four"
    assert energy_class(geom(5, 7)) == "none"  # -1 is a square mod 5
    assert energy_class(geom(3, 3)) == "none"


def test_mixed_bound_formula():
    bounds, window = energy_bounds(5, 4, 25, "even")
    assert bounds["mixed"] == pytest.approx(25**3 / 5 + 5**0.5 * 25**2.5 + 5 * 25**2)
    assert window  # 5 <= 25 <= 125
    bounds, window = energy_bounds(3, 7, 100, "three_mod_four")
    assert bounds["corollary"] == pytest.approx(3 * 100**2.5 + 3**2.5 * 100**2)
    assert window == (3**2.5 <= 100 <= 3**4)


def test_search_full_size_returns_p():
    g = geom(3, 3)
    E, rep = energy_extremizer_search(g, g.size)
    assert E.members == tuple(range(9)) and rep.size == 9


def test_search_beats_its_random_draws_and_is_deterministic():
    g = geom(3, 3)
    E, rep = energy_extremizer_search(g, 5, trials=16, seed=3)
    seeds = np.random.SeedSequence(3).spawn(18)
    for ss in seeds[:16]:
        members = np.random.default_rng(ss).choice(g.size, 5, replace=False)
        assert rep.energy >= additive_energy(PointSubset(g, members))
    assert rep.energy == additive_energy(E, "convolution")
    E2, rep2 = energy_extremizer_search(g, 5, trials=16, seed=3)
    assert E2.members == E.members and rep2 == rep


def test_search_finds_omega_structure():
    g = geom(3, 5)
    _, rep = energy_extremizer_search(g, 9, trials=4, seed=0, swaps=0)
    assert rep.energy == 729


def test_search_rejects_bad_size():
    with pytest.raises(ContractError):
        energy_extremizer_search(geom(3, 2), 4)


@pytest.mark.parametrize("q", (3, 5))
def test_energy_probe_d4(q):
    g = geom(q, 4)
    reports = []
    for size in (3, 9, 27, 50):
        if size > g.size:
            continue
        _, rep = energy_extremizer_search(g, size, trials=8, seed=1)
        if rep.in_window:
            reports.append(rep)
    assert reports and max_ratio(reports) <= 8
