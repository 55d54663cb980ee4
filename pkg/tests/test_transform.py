import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffrestrict.errors import ContractError, ResourceLimitError
from ffrestrict.field import FieldContext, field
from ffrestrict.transform import (
    GridFunction,
    Measure,
    convolve,
    encode,
    fourier_forward,
    fourier_inverse,
    grid_coords,
    inner,
    lp_norm,
)
from oracles import SlowField, points, slow_fourier

CELLS = [(d, q) for d in (1, 2, 3) for q in (3, 5, 7)]


def rand(ctx, d, seed, measure=Measure.COUNTING):
    return GridFunction.random(ctx, d, np.random.default_rng(seed), measure)


def test_grid_order_is_first_coordinate_major():
    ctx = field(3)
    coords = grid_coords(ctx, 2)
    assert [tuple(c) for c in coords] == points(3, 2)
    assert encode(ctx, [1, 2]) == 5


def test_delta_transforms_to_one():
    for d, q in [(1, 3), (2, 5), (3, 3)]:
        g = GridFunction.delta(field(q), d)
        assert np.allclose(fourier_forward(g).values, 1)


def test_constant_transforms_to_spike():
    g = GridFunction.constant(field(3), 1)
    assert np.allclose(fourier_forward(g).values, [3, 0, 0], atol=1e-12)


def test_hyperplane_indicator_d2_q3():
    ctx = field(3)
    idx = [encode(ctx, [0, m2]) for m2 in range(3)]
    ghat = fourier_forward(GridFunction.indicator(ctx, 2, idx)).values.reshape(3, 3)
    expected = np.zeros((3, 3))
    expected[:, 0] = 3  # xi_2 = 0
    assert np.allclose(ghat, expected, atol=1e-12)


@pytest.mark.parametrize("q", (3, 5, 9))
def test_forward_matches_double_sum(q):
    ctx = field(q)
    F = SlowField(ctx.p, ctx.modulus)
    g = rand(ctx, 2, q)
    assert np.allclose(fourier_forward(g).values, slow_fourier(F, list(g.values), 2), atol=1e-9)


def test_inverse_examples():
    ctx = field(5)
    one = GridFunction.constant(ctx, 2, measure=Measure.NORMALIZED)
    assert np.allclose(fourier_inverse(one).values, GridFunction.delta(ctx, 2).values, atol=1e-12)
    spike = GridFunction.delta(ctx, 2, height=25.0, measure=Measure.NORMALIZED)
    assert np.allclose(fourier_inverse(spike).values, 1)


def test_measure_tags_enforced():
    ctx = field(3)
    with pytest.raises(ContractError):
        fourier_forward(GridFunction.constant(ctx, 2, measure=Measure.NORMALIZED))
    with pytest.raises(ContractError):
        fourier_inverse(GridFunction.constant(ctx, 2))
    with pytest.raises(ContractError):
        convolve(GridFunction.constant(ctx, 2), GridFunction.constant(ctx, 2, measure=Measure.NORMALIZED))
    with pytest.raises(ContractError):
        convolve(GridFunction.constant(ctx, 2), GridFunction.constant(field(5), 2))


def test_length_must_match():
    with pytest.raises(ContractError):
        GridFunction(field(3), 2, np.zeros(8, complex), Measure.COUNTING)


def test_grid_cap_guard():
    small = FieldContext.of_order(5, grid_cap=100)
    with pytest.raises(ResourceLimitError):
        GridFunction.zeros(small, 3)


@pytest.mark.parametrize("d,q", CELLS)
def test_plancherel_and_inversion(d, q):
    ctx = field(q)
    for seed in range(20):
        g = rand(ctx, d, seed)
        ghat = fourier_forward(g)
        assert abs(lp_norm(ghat, 2) - lp_norm(g, 2)) < 1e-9 * lp_norm(g, 2)
        assert np.allclose(fourier_inverse(ghat).values, g.values, rtol=0, atol=1e-9 * np.abs(g.values).max())


@pytest.mark.parametrize("d,q", [(2, 3), (2, 5), (3, 3)])
def test_set_plancherel(d, q):
    ctx = field(q)
    rng = np.random.default_rng(7)
    n = q**d
    for _ in range(50):
        G = rng.choice(n, int(rng.integers(1, n + 1)), replace=False)
        ghat = fourier_forward(GridFunction.indicator(ctx, d, G)).values
        assert abs(np.sum(np.abs(ghat) ** 2) / n - len(G)) < 1e-9 * len(G)
        F = GridFunction.indicator(ctx, d, G, Measure.NORMALIZED)
        fv = fourier_inverse(F).values
        assert abs(np.sum(np.abs(fv) ** 2) - len(G) / n) < 1e-12


def slow_convolve(a, b, ctx, d):
    pts = points(ctx.q, d)
    index = {p: i for i, p in enumerate(pts)}
    out = np.zeros(len(pts), complex)
    for i, n_ in enumerate(pts):
        for j, m in enumerate(pts):
            diff = tuple(int(ctx.sub(x, y)) for x, y in zip(n_, m))
            out[i] += a[index[diff]] * b[j]
    return out


@pytest.mark.parametrize("q", (3, 9))
def test_convolution_matches_definition(q):
    ctx = field(q)
    a, b = rand(ctx, 2, 1), rand(ctx, 2, 2)
    assert np.allclose(convolve(a, b).values, slow_convolve(a.values, b.values, ctx, 2), atol=1e-9)


@pytest.mark.parametrize("d,q", CELLS)
def test_convolution_theorem_both_measures(d, q):
    ctx = field(q)
    a, b = rand(ctx, d, 3), rand(ctx, d, 4)
    lhs = fourier_forward(convolve(a, b)).values
    rhs = fourier_forward(a).values * fourier_forward(b).values
    assert np.allclose(lhs, rhs, atol=1e-9 * np.abs(rhs).max())
    fa, fb = rand(ctx, d, 5, Measure.NORMALIZED), rand(ctx, d, 6, Measure.NORMALIZED)
    lhs = fourier_inverse(convolve(fa, fb)).values
    rhs = fourier_inverse(fa).values * fourier_inverse(fb).values
    assert np.allclose(lhs, rhs, atol=1e-9 * np.abs(rhs).max())


def test_convolution_examples():
    ctx = field(5)
    g = rand(ctx, 2, 0)
    assert np.allclose(convolve(GridFunction.delta(ctx, 2), g).values, g.values)
    E = [1, 7, 12, 20]
    negE = [encode(ctx, ctx.neg_table[grid_coords(ctx, 2)[i]]) for i in E]
    auto = convolve(GridFunction.indicator(ctx, 2, E), GridFunction.indicator(ctx, 2, negE))
    assert auto.values[0] == pytest.approx(len(E))
    one = GridFunction.constant(field(3), 1, measure=Measure.NORMALIZED)
    assert np.allclose(convolve(one, one).values, 1)


def test_norm_examples():
    ctx = field(3)
    G = [0, 4, 8, 10, 20]
    ind = GridFunction.indicator(ctx, 3, G)
    for p in (1, 2, 3.5):
        assert lp_norm(ind, p) == pytest.approx(len(G) ** (1 / p))
    assert lp_norm(ind, np.inf) == 1
    c = GridFunction.constant(ctx, 3, 2 - 1j, Measure.NORMALIZED)
    for p in (1, 2, 7, np.inf):
        assert lp_norm(c, p) == pytest.approx(abs(2 - 1j))
    assert lp_norm(GridFunction.delta(ctx, 2), 2) == 1
    with pytest.raises(ContractError):
        lp_norm(ind, 0.5)


def test_inner_product_conventions():
    ctx = field(3)
    a, b = rand(ctx, 2, 1), rand(ctx, 2, 2)
    assert inner(a, b) == pytest.approx(np.sum(a.values * np.conj(b.values)))
    fa = a.with_values(a.values)
    assert inner(fa, fa).real == pytest.approx(lp_norm(fa, 2) ** 2)


def test_json_round_trip():
    ctx = field(9)
    g = rand(ctx, 2, 11, Measure.NORMALIZED)
    obj = json.loads(g.to_json())
    assert set(obj) == {"q", "p", "n", "modulus", "d", "measure", "values"}
    assert obj["measure"] == "normalized" and obj["modulus"] == [1, 0, 1]
    back = GridFunction.from_json(g.to_json())
    assert back.ctx == ctx and back.measure is Measure.NORMALIZED
    assert np.array_equal(back.values, g.values)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(1, 3), (2, 3), (2, 5), (1, 9)]), st.integers(0, 2**32 - 1))
def test_round_trip_property(cell, seed):
    d, q = cell
    g = rand(field(q), d, seed)
    back = fourier_inverse(fourier_forward(g)).values
    assert np.max(np.abs(back - g.values)) <= 1e-9 * max(1.0, np.abs(g.values).max())
