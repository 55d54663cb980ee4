import csv
import io
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from ffrestrict.errors import ContractError
from ffrestrict.field import field
from ffrestrict.norms import (
    CSV_HEADER,
    estimates_to_csv,
    exact_norm_2_2,
    extension_ratio,
    fit_loglog,
    holder_maximizer,
    norm_lower_bound,
    omega_witness_ratio,
    predicted_witness_slope,
    restriction_ratio,
    scaling_scan,
)
from ffrestrict.paraboloid import SurfaceFunction, build_paraboloid
from ffrestrict.transform import weighted_lp_norm


def geom(q, d):
    return build_paraboloid(field(q), d)


def test_exact_2_2_examples():
    assert exact_norm_2_2(geom(3, 2)) == pytest.approx(math.sqrt(3))
    assert exact_norm_2_2(geom(5, 3)) == pytest.approx(math.sqrt(5))


@pytest.mark.parametrize("d,q", [(2, 3), (2, 5), (2, 7), (3, 3), (3, 5)])
def test_ascent_reaches_sqrt_q_at_2_2(d, q):
    est = norm_lower_bound(geom(q, d), 2, 2, restarts=2, seed=1)
    assert abs(est.value - math.sqrt(q)) < 1e-6
    assert est.value <= math.sqrt(q) * (1 + 1e-12)


def constant_ratio_closed_form(q, d, r):
    # (dsigma)^v is 1 at 0, 0 on the rest of m_d = 0, and has modulus q^{-(d-1)/2} elsewhere
    count = q ** (d - 1) * (q - 1)
    return (1 + count * q ** (-(d - 1) * r / 2)) ** (1 / r)


@pytest.mark.parametrize("q", (3, 5))
def test_constant_witness_ratio_closed_form(q):
    g = geom(q, 2)
    assert extension_ratio(SurfaceFunction.constant(g), 2, 4) == pytest.approx(constant_ratio_closed_form(q, 2, 4))
    est = norm_lower_bound(g, 2, 4, restarts=3)
    assert est.value >= constant_ratio_closed_form(q, 2, 4) - 1e-12


def test_estimate_recomputes_and_history_is_monotone():
    est = norm_lower_bound(geom(5, 2), 2, 3, restarts=3, seed=7)
    assert est.recompute() == pytest.approx(est.value, rel=1e-9)
    assert np.all(np.diff(est.history) >= -1e-9 * max(est.history))
    assert est.method in ("Ascent", "IndicatorSweep", "ConstantFunction")


@pytest.mark.parametrize("p,r", [(2, 4), ("3/2", 3), (2, 3)])
def test_restriction_side_is_bounded_by_extension_value(p, r):
    # the dual witness from the ascent certifies the same norm from the other side
    g = geom(5, 2)
    est = norm_lower_bound(g, p, r, restarts=2, seed=2)
    assert est.g_witness is not None
    from ffrestrict.transform import GridFunction, Measure

    gw = GridFunction(g.ctx, 2, est.g_witness, Measure.COUNTING)
    assert restriction_ratio(gw, g, p, r) <= est.value * (1 + 1e-6) + 1e-6


def test_estimates_are_deterministic():
    a = norm_lower_bound(geom(3, 3), 2, 4, restarts=2, seed=11)
    b = norm_lower_bound(geom(3, 3), 2, 4, restarts=2, seed=11)
    assert a.value == b.value and np.array_equal(a.witness.values, b.witness.values)


def test_holder_maximizer_attains_dual_norm():
    rng = np.random.default_rng(0)
    h = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    w = 1 / 9
    for p in (1.5, 2.0, 4.0):
        x = holder_maximizer(h, p, w)
        assert weighted_lp_norm(x, p, w) == pytest.approx(1)
        pairing = (w * np.sum(x * np.conj(h))).real
        assert pairing == pytest.approx(weighted_lp_norm(h, p / (p - 1), w))


def test_bad_arguments():
    with pytest.raises(ContractError):
        norm_lower_bound(geom(3, 2), 2, 4, restarts=0)
    with pytest.raises(ContractError):
        extension_ratio(SurfaceFunction(geom(3, 2), np.zeros(3, complex)), 2, 2)
    with pytest.raises(ContractError):
        scaling_scan(2, 2, 4, [3, 5])


def test_csv_and_json_shapes():
    est = norm_lower_bound(geom(3, 2), "3/2", "inf", restarts=1)
    rows = list(csv.reader(io.StringIO(estimates_to_csv([est]))))
    assert rows[0] == CSV_HEADER
    assert rows[1][:6] == ["2", "3", "3", "2", "inf", "1"]
    rep = scaling_scan(2, 2, 2, [3, 5, 7], restarts=1)
    obj = json.loads(rep.to_json())
    assert obj["p"] == "2" and len(obj["points"]) == 3
    assert rep.slope == pytest.approx(0.5, abs=1e-9)


def test_fit_loglog_exact_power():
    slope, intercept, resid = fit_loglog([(q, 2 * q**0.75) for q in (3, 5, 7, 11)])
    assert slope == pytest.approx(0.75) and intercept == pytest.approx(math.log(2)) and resid < 1e-12


def test_predicted_slope_formula():
    assert predicted_witness_slope(5, 2, "5/2", 2) == Fraction(3, 10)
    assert predicted_witness_slope(5, 2, "5/2", 4) == Fraction(-9, 20)
    # on the subspace line r = p(d-k)/((p-1)(d-1-k)) the slope vanishes
    assert predicted_witness_slope(5, 2, "5/2", "5/2") == 0


@pytest.mark.parametrize("d,q", [(3, 5), (4, 3), (5, 3), (5, 7)])
@pytest.mark.parametrize("p,r", [("5/2", 2), (2, 4), ("3/2", 3)])
def test_omega_ratio_is_exact_power_of_q(d, q, p, r):
    # 1_Omega extends to q^{k-d+1} times the indicator of W-perp x F_q, so the ratio is q^slope
    value, k = omega_witness_ratio(geom(q, d), p, r)
    expected = q ** float(predicted_witness_slope(d, k, p, r))
    assert value == pytest.approx(expected, rel=1e-9)


def test_omega_slope_d5_over_three_fields():
    pts = [(q, omega_witness_ratio(geom(q, 5), "5/2", 2)[0]) for q in (3, 7, 11)]
    slope, _, _ = fit_loglog(pts)
    assert abs(slope - 0.3) <= 0.05
