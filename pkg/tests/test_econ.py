"""Cost-of-pass core: worked examples, independent oracles, invariants."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llmecon.econ import (
    EconomicsParams,
    break_even_accuracy,
    cost_of_pass,
    extended_cost_of_pass,
    sweep,
)
from llmecon.errors import DomainError

from oracles import breakeven_by_bisection, unrolled_recursion

money = st.floats(min_value=0.0, max_value=10.0, allow_nan=False)
probability = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


# ---------------------------------------------------------------------------
# cost_of_pass


def test_cost_of_pass_one_attempt_when_certain():
    assert cost_of_pass(0.02, 1.0) == 0.02


def test_cost_of_pass_divides_by_success_rate():
    assert cost_of_pass(0.02, 0.4) == 0.02 / 0.4
    assert cost_of_pass(0.02, 0.4) == pytest.approx(0.05, rel=1e-15)


def test_cost_of_pass_rejects_zero_and_out_of_range_success():
    with pytest.raises(DomainError, match="success rate out of range"):
        cost_of_pass(0.001, 0.0)
    with pytest.raises(DomainError, match="success rate out of range"):
        cost_of_pass(0.001, -0.1)
    with pytest.raises(DomainError, match="success rate out of range"):
        cost_of_pass(0.001, 1.5)
    with pytest.raises(DomainError):
        cost_of_pass(-0.001, 0.5)


# ---------------------------------------------------------------------------
# extended_cost_of_pass


def test_extended_collapses_to_g_plus_v_when_certain():
    result = extended_cost_of_pass(EconomicsParams(g=0.01, v=0.1, h=1.0, r=0.5, s=1.0))
    assert result.cop_ex == pytest.approx(0.11, rel=1e-12)
    assert result.denominator == 1.0
    assert result.beats_human


def test_extended_reduces_to_cost_of_pass_at_full_retry():
    params = EconomicsParams(g=0.02, v=0.0, h=1.0, r=1.0, s=0.4)
    result = extended_cost_of_pass(params)
    assert result.cop_ex == cost_of_pass(0.02, 0.4)
    assert result.cop_ex == pytest.approx(0.05, rel=1e-15)


def test_extended_derived_case_matches_recursion_oracle():
    # expected value computed two independent ways: the exact fraction and
    # the unrolled recursion
    params = EconomicsParams(g=0.003, v=0.1, h=1.0, r=0.5, s=0.5)
    result = extended_cost_of_pass(params)
    assert result.cop_ex == pytest.approx(0.353 / 0.75, rel=1e-15)
    assert result.cop_ex == pytest.approx(unrolled_recursion(0.003, 0.1, 1.0, 0.5, 0.5), rel=1e-12)
    assert result.denominator == pytest.approx(0.75, rel=1e-15)


def test_extended_rejects_nonterminating_loop():
    with pytest.raises(DomainError, match="non-terminating retry loop"):
        extended_cost_of_pass(EconomicsParams(g=0.01, v=0.0, h=1.0, r=1.0, s=0.0))


def test_params_validate_on_construction():
    with pytest.raises(DomainError, match="rerun willingness out of range"):
        EconomicsParams(g=0.01, v=0.0, h=1.0, r=1.2, s=0.5)
    with pytest.raises(DomainError, match="success rate out of range"):
        EconomicsParams(g=0.01, v=0.0, h=1.0, r=0.5, s=-0.1)
    with pytest.raises(DomainError, match="finite nonnegative"):
        EconomicsParams(g=-0.01, v=0.0, h=1.0, r=0.5, s=0.5)
    with pytest.raises(DomainError, match="finite nonnegative"):
        EconomicsParams(g=math.inf, v=0.0, h=1.0, r=0.5, s=0.5)


@settings(max_examples=300, deadline=None)
@given(g=st.floats(min_value=1e-7, max_value=10.0), s=st.floats(min_value=1e-9, max_value=1.0))
def test_full_retry_reduction_within_4_ulp(g, s):
    result = extended_cost_of_pass(EconomicsParams(g=g, v=0.0, h=3.0, r=1.0, s=s))
    expected = g / s
    assert abs(result.cop_ex - expected) <= 4 * math.ulp(expected)


@settings(max_examples=300, deadline=None)
@given(g=money, v=money, h=money, r=probability, s=probability)
def test_closed_form_satisfies_the_recursion(g, v, h, r, s):
    if r == 1.0 and s == 0.0:
        return
    cop = extended_cost_of_pass(EconomicsParams(g=g, v=v, h=h, r=r, s=s)).cop_ex
    rhs = g + v + (cop * r + h * (1 - r)) * (1 - s)
    assert abs(cop - rhs) <= 1e-12 * max(cop, 1.0)


@settings(max_examples=300, deadline=None)
@given(g=money, v=money, h=money, r=probability, s=probability)
def test_cop_at_least_g_plus_v_and_denominator_in_unit_interval(g, v, h, r, s):
    if r == 1.0 and s == 0.0:
        return
    result = extended_cost_of_pass(EconomicsParams(g=g, v=v, h=h, r=r, s=s))
    assert result.cop_ex >= g + v
    assert 0.0 < result.denominator <= 1.0


@settings(max_examples=300, deadline=None)
@given(g=money, v=money, h=money, s=probability)
def test_no_retry_literal_form_is_exact(g, v, h, s):
    result = extended_cost_of_pass(EconomicsParams(g=g, v=v, h=h, r=0.0, s=s))
    assert result.cop_ex == (g + v) + h * (1.0 - s)


@settings(max_examples=200, deadline=None)
@given(
    g=money, v=money, h=money, r=probability,
    s_pair=st.tuples(st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.0, max_value=1.0)),
)
def test_cop_nonincreasing_in_success_rate(g, v, h, r, s_pair):
    s_lo, s_hi = sorted(s_pair)
    if r == 1.0 and s_lo == 0.0:
        return
    cop_lo = extended_cost_of_pass(EconomicsParams(g=g, v=v, h=h, r=r, s=s_lo)).cop_ex
    cop_hi = extended_cost_of_pass(EconomicsParams(g=g, v=v, h=h, r=r, s=s_hi)).cop_ex
    assert cop_hi <= cop_lo * (1 + 1e-13) + 1e-300


@settings(max_examples=200, deadline=None)
@given(
    base=st.tuples(money, money, money, probability, st.floats(min_value=0.0, max_value=0.999)),
    bump=st.floats(min_value=0.0, max_value=5.0),
    axis=st.sampled_from(["g", "v", "h"]),
)
def test_cop_nondecreasing_in_costs(base, bump, axis):
    g, v, h, r, s = base
    if r == 1.0 and s == 0.0:
        return
    low = EconomicsParams(g=g, v=v, h=h, r=r, s=s)
    kwargs = {"g": g, "v": v, "h": h, "r": r, "s": s}
    kwargs[axis] = kwargs[axis] + bump
    high = EconomicsParams(**kwargs)
    cop_low = extended_cost_of_pass(low).cop_ex
    cop_high = extended_cost_of_pass(high).cop_ex
    assert cop_high >= cop_low * (1 - 1e-13) - 1e-300


# ---------------------------------------------------------------------------
# break_even_accuracy


def test_break_even_free_system_always_wins():
    assert break_even_accuracy(0.0, 0.0, 1.0) == 0.0


def test_break_even_derived_case_matches_bisection_oracle():
    s_star = break_even_accuracy(0.0015, 0.1, 1.0)
    assert s_star == 0.1015
    for r in (0.0, 0.3, 0.9):
        assert breakeven_by_bisection(0.0015, 0.1, 1.0, r) == pytest.approx(s_star, abs=1e-9)


def test_break_even_never_beats_human():
    assert break_even_accuracy(0.95, 0.1, 1.0) is None
    assert break_even_accuracy(0.5, 0.5, 1.0) is None  # equality is unattainable too


def test_break_even_rejects_nonpositive_human_cost():
    with pytest.raises(DomainError, match="human cost must be positive"):
        break_even_accuracy(0.1, 0.1, 0.0)


@settings(max_examples=300, deadline=None)
@given(
    g=st.floats(min_value=0.0, max_value=0.9),
    v=st.floats(min_value=0.0, max_value=0.9),
    h=st.floats(min_value=1e-3, max_value=10.0),
)
def test_break_even_is_r_independent(g, v, h):
    if g + v >= h:
        assert break_even_accuracy(g, v, h) is None
        return
    s_star = break_even_accuracy(g, v, h)
    for r in (0.0, 0.25, 0.5, 0.75, 0.99):
        cop = extended_cost_of_pass(EconomicsParams(g=g, v=v, h=h, r=r, s=s_star)).cop_ex
        assert abs(cop - h) <= 1e-9 * h


# ---------------------------------------------------------------------------
# sweep


BASE = EconomicsParams(g=0.003, v=0.1, h=1.0, r=0.5, s=0.5)


def test_sweep_single_certain_point():
    rows = sweep(BASE, "s", [1.0])
    assert len(rows) == 1
    assert rows[0].result.cop_ex == pytest.approx(0.103, rel=1e-12)


def test_sweep_success_grid_is_strictly_decreasing():
    rows = sweep(BASE, "s", [0.25, 0.5, 1.0])
    values = [row.result.cop_ex for row in rows]
    # each cell recomputed by hand from the closed form
    assert values[0] == pytest.approx(0.478 / 0.625, rel=1e-12)
    assert values[1] == pytest.approx(0.353 / 0.75, rel=1e-12)
    assert values[2] == pytest.approx(0.103, rel=1e-12)
    assert values[0] > values[1] > values[2]
    assert [row.value for row in rows] == [0.25, 0.5, 1.0]


def test_sweep_rejects_out_of_range_value_with_no_partial_output():
    with pytest.raises(DomainError, match=r"value out of range: r=1.2"):
        sweep(BASE, "r", [0.0, 1.2, 0.5])


def test_sweep_rejects_unknown_axis():
    with pytest.raises(DomainError, match="unknown sweep axis"):
        sweep(BASE, "q", [0.5])


def test_sweep_rejects_grid_value_that_makes_the_loop_nonterminating():
    base = EconomicsParams(g=0.003, v=0.1, h=1.0, r=1.0, s=0.5)
    with pytest.raises(DomainError, match="value out of range: s=0.0"):
        sweep(base, "s", [0.5, 0.0])
