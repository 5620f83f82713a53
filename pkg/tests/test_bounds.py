import json
import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from bhgbound.bounds import (
    BhgInstance, all_bounds, b3_weight, build_G, capped_weighted_sum, case2_caps,
    check_improvement_inequality, cju_constant, crt_constant, g_lhs, g_min_closed_form,
    prop31_bound, round_down, round_up, solve_sinc, thm11_constant, trivial_bound,
)
from bhgbound.trigcert import certified_min, partition, Interval


def mp_sinc_root(target):
    mpmath.mp.dps = 40
    return mpmath.findroot(lambda x: mpmath.sin(x) / x - target, (mpmath.mpf("1e-30"), mpmath.pi),
                           solver="bisect")


def mp_thm11(h):
    mpmath.mp.dps = 40
    c = mpmath.cos(mpmath.pi / h)
    lhs = 4 / (3 - c) - 1
    x = mp_sinc_root(lhs ** h)
    return float(x * mpmath.factorial(h) * h / mpmath.pi)


def test_instance_validation():
    with pytest.raises(ValueError):
        BhgInstance(1, 1, 10)
    with pytest.raises(ValueError):
        BhgInstance(2, 0, 10)
    with pytest.raises(ValueError):
        BhgInstance(2, 1, 0)


def test_old_constants_closed_forms():
    assert crt_constant(3) == pytest.approx(16.0)
    assert crt_constant(4) == pytest.approx(76.8)
    assert cju_constant(3) == pytest.approx(18.0)
    with pytest.raises(ValueError):
        crt_constant(2)


@pytest.mark.parametrize("target", [0.0, 0.1, 0.5, 0.9, 0.999, 1.0])
def test_sinc_root_bracket(target):
    r = solve_sinc(target, 1e-12)
    assert r.lo <= r.root <= r.hi
    assert r.hi - r.lo <= 1e-12 * max(1.0, r.hi) + 1e-15
    if 0 < target < 1:
        assert r.root == pytest.approx(float(mp_sinc_root(target)), abs=1e-11)
    if target == 0:
        assert r.root == pytest.approx(math.pi)
    if target == 1:
        assert r.degenerate and r.root == 0.0


def test_sinc_rejects_out_of_range():
    with pytest.raises(ValueError):
        solve_sinc(1.2)
    with pytest.raises(ValueError):
        solve_sinc(-0.1)


@pytest.mark.parametrize("h", [3, 4, 5, 6, 7, 10])
def test_thm11_matches_high_precision(h):
    got, oracle = thm11_constant(h), mp_thm11(h)
    assert got == pytest.approx(oracle, rel=1e-11)
    # The upper bracket of the root keeps the constant on the safe side.
    assert got >= oracle * (1 - 1e-15)


@pytest.mark.parametrize("h", [3, 4, 5, 8])
def test_g_minimum_certified(h):
    G = build_G(h)
    c = certified_min(G, Interval(-math.pi / h, math.pi / h), 1e-10)
    assert c.lower <= g_min_closed_form(h) <= c.upper + 1e-9
    assert g_lhs(h) == pytest.approx((math.cos(math.pi / h) * g_min_closed_form(h)) ** h)
    assert sum(abs(v) for v in G.coeffs) == pytest.approx(1 / math.cos(math.pi / h))


def test_improvement_inequality_small_h():
    for h in (3, 4, 10, 100):
        r = check_improvement_inequality(h)
        assert r.holds and r.root_below_cap
        assert r.x_h < r.x_h_cap


def test_report_and_json():
    inst = BhgInstance(4, 1, 10 ** 6)
    reps = all_bounds(inst, ("trivial", "crt", "cju", "thm11"))
    assert [r.method for r in reps] == ["trivial", "crt", "cju", "thm11"]
    for r in reps:
        assert r.cardinality_bound == pytest.approx((r.constant * 10 ** 6) ** 0.25)
        assert json.loads(r.to_json())["method"] == r.method
    assert [r.asymptotic for r in reps] == [False, False, False, True]
    assert trivial_bound(inst).constant == 96


def test_h2_skips_cosine_methods():
    reps = all_bounds(BhgInstance(2, 1, 100))
    assert [r.method for r in reps] == ["trivial", "cju"]


def test_directional_rounding_is_decimal_exact():
    assert round_up(14.3, 1) == 14.3
    assert round_up(14.2947, 1) == 14.3
    assert round_down(1.22289, 4) == 1.2228
    assert round_up(-0.05, 1) == -0.0


def test_prop31_monotone_and_degenerate():
    inst = BhgInstance(3, 1, 1000)
    a, _ = prop31_bound(1.2, inst)
    b, _ = prop31_bound(1.2228, inst)
    assert b.constant < a.constant
    assert a.constant == pytest.approx(thm11_constant(3), rel=1e-9)
    top, root = prop31_bound(1 / math.cos(math.pi / 3), inst)
    assert root.degenerate and top.constant == 0.0
    with pytest.raises(ValueError):
        prop31_bound(2.5, inst)


def test_caps_are_cumulative_and_below_one():
    caps = case2_caps(14.295, 128, 128, 5)
    qs = [q for q, _ in caps]
    betas = [b for _, b in caps]
    assert qs == [1, 2, 3, 4, 5]
    assert betas == sorted(betas) and betas[-1] < 1
    assert betas[0] == pytest.approx((72 / 128 / 14.295) ** (1 / 3))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=6, max_size=10))
def test_capped_sum_matches_nested_greedy(values):
    # Caps on prefixes 1..q; when the prefix values increase the optimum
    # fills each prefix to its cap in order, which gives a closed form.
    values = sorted(values[:5]) + [max(values[:5]) + 0.5] * (len(values) - 5)
    caps = [(q, min(1.0, 0.2 * q)) for q in range(1, 5)]
    got, x = capped_weighted_sum(values, caps)
    best_rest = min(values[4:])
    expect = 0.0
    prev = 0.0
    for q, beta in caps:
        expect += (beta - prev) * values[q - 1]
        prev = beta
    expect += (1 - prev) * min(best_rest, values[4])
    assert got == pytest.approx(expect, abs=1e-12)
    assert got <= float(sum(a * v for a, v in zip(x, values))) + 1e-12
    assert sum(x) == 1


def test_b3_weight_interval_minima_certified():
    H = b3_weight()
    cells = partition(128, 3)
    mins = [certified_min(H, iv) for iv in cells[:8]]
    # The leftmost cell holds the smallest value; it is attained at the end point.
    assert mins[0].lower <= H(-math.pi / 3) <= mins[0].upper
    assert all(a.upper < b.lower for a, b in zip(mins[:5], mins[1:5]))
