from __future__ import annotations

from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cloudcost.finance import (
    FinanceError,
    FinancialOption,
    OnPremisePlan,
    ServerClass,
    annualize,
    compare_options,
    npv,
    on_premise_cash_flows,
)
from cloudcost.patterns import MonthWindow, YearMonth

START = YearMonth.parse("2010-09")


def option(label: str, flows: dict) -> FinancialOption:
    return FinancialOption(label=label,
                           cash_flows={y: Decimal(str(v)) for y, v in flows.items()})


SCHOOL_PLAN = OnPremisePlan(
    server_classes=(
        ServerClass(label="app", unit_capital=Decimal(1550), count=9,
                    electricity_per_year=Decimal(106)),
        ServerClass(label="storage", unit_capital=Decimal(2500), count=3,
                    electricity_per_year=Decimal(155)),
    ),
    upgrade_cycle_years=3,
)


# --- annualize ----------------------------------------------------------------

def _flat_report(months: int, per_month: str):
    from cloudcost.engine import CostReport
    window = MonthWindow(START, START.plus(months - 1))
    totals = {m: Decimal(per_month) for m in window}
    return CostReport(lines=(), monthly_totals=totals, group_totals={}, window=window,
                      model_name="flat", catalog_label="test")


def test_annualize_single_year():
    report = _flat_report(12, "10")
    result = annualize(report, START)
    assert result.cash_flows == {0: Decimal(120)}


def test_annualize_six_years():
    report = _flat_report(72, "10")
    result = annualize(report, START)
    assert sorted(result.cash_flows) == list(range(6))
    assert all(v == 120 for v in result.cash_flows.values())


def test_annualize_rejects_partial_year():
    report = _flat_report(13, "10")
    with pytest.raises(FinanceError, match="year-aligned"):
        annualize(report, START)


def test_annualize_rejects_wrong_start():
    report = _flat_report(12, "10")
    with pytest.raises(FinanceError, match="expected"):
        annualize(report, START.plus(1))


# --- on-premise plan ------------------------------------------------------------

def test_buy_year0_is_capital_plus_electricity():
    flows = on_premise_cash_flows(SCHOOL_PLAN, 6).cash_flows
    assert flows[0] == Decimal(22869)  # 13950 + 7500 + 954 + 465


def test_buy_year1_is_electricity_only():
    flows = on_premise_cash_flows(SCHOOL_PLAN, 6).cash_flows
    assert flows[1] == Decimal(1419)  # 9*106 + 3*155


def test_buy_recapitalizes_on_cycle():
    flows = on_premise_cash_flows(SCHOOL_PLAN, 6).cash_flows
    assert flows[3] == flows[0]
    assert flows[2] == flows[4] == flows[5] == Decimal(1419)


# --- npv -----------------------------------------------------------------------

def test_npv_year0_undiscounted():
    result = npv(option("o", {0: 22800}), "0.05")
    assert result.npv == Decimal(22800)


def test_npv_single_deferred_flow():
    result = npv(option("o", {1: 105}), "0.05")
    assert result.npv == Decimal(100)
    assert result.per_year_discounted[1] == Decimal(100)


def test_npv_zero_rate_is_plain_sum():
    result = npv(option("o", {0: 10, 1: 20, 2: 30.5}), "0")
    assert result.npv == Decimal("60.5")


def test_npv_invariant_sum_of_years():
    result = npv(option("o", {0: 100, 1: 50, 3: 75}), "0.08")
    assert result.npv == sum(result.per_year_discounted.values())


def test_npv_rejects_rate_below_minus_one():
    with pytest.raises(FinanceError):
        npv(option("o", {0: 1}), "-1.5")


def test_negative_flow_rejected():
    with pytest.raises(FinanceError, match="negative"):
        option("o", {0: -5})


# --- compare ---------------------------------------------------------------------

def test_compare_needs_two_options():
    with pytest.raises(FinanceError, match=">= 2"):
        compare_options([option("a", {0: 1})], "0.05", reference="a")


def test_compare_unknown_reference():
    with pytest.raises(FinanceError, match="reference"):
        compare_options([option("a", {0: 1}), option("b", {0: 2})], "0.05", reference="zz")


def test_compare_identical_options_tie_stably():
    comparison = compare_options(
        [option("beta", {0: 10}), option("alpha", {0: 10})], "0.05", reference="beta")
    assert [r.label for r in comparison.rows] == ["alpha", "beta"]
    assert all(r.pct_vs_reference == 0 for r in comparison.rows)


def test_compare_percentages_vs_reference():
    comparison = compare_options(
        [option("buy", {0: 100}), option("lease", {0: 250})], "0.05", reference="buy")
    by_label = {r.label: r for r in comparison.rows}
    assert by_label["lease"].pct_vs_reference == Decimal("1.5")  # +150%
    assert [r.label for r in comparison.rows] == ["buy", "lease"]


@settings(deadline=None)
@given(k=st.integers(1, 1000),
       flows=st.lists(st.tuples(st.integers(0, 5), st.integers(0, 10000)),
                      min_size=1, max_size=6))
def test_compare_ranking_scale_invariant(k, flows):
    base = {}
    for year, amount in flows:
        base[year] = base.get(year, 0) + amount
    a = option("a", base)
    b = option("b", {y: v * 2 + 1 for y, v in base.items()})
    order = [r.label for r in compare_options([a, b], "0.05", reference="a").rows]
    scaled = [r.label for r in compare_options(
        [option("a", {y: v * k for y, v in a.cash_flows.items()}),
         option("b", {y: v * k for y, v in b.cash_flows.items()})], "0.05", reference="a").rows]
    assert order == scaled


@settings(deadline=None)
@given(rate1=st.decimals(min_value="0.01", max_value="0.30", places=3),
       rate2=st.decimals(min_value="0.01", max_value="0.30", places=3))
def test_higher_rates_favor_deferred_costs(rate1, rate2):
    if rate1 == rate2:
        return
    low, high = sorted([rate1, rate2])
    upfront = option("upfront", {0: 1000})
    deferred = option("deferred", {1: 400, 2: 400, 3: 400})
    # the deferred option's npv falls strictly faster as the rate rises
    drop_deferred = npv(deferred, low).npv - npv(deferred, high).npv
    drop_upfront = npv(upfront, low).npv - npv(upfront, high).npv
    assert drop_deferred > drop_upfront
    assert npv(deferred, high).npv < npv(deferred, low).npv


def test_npv_strictly_decreasing_in_rate():
    flows = option("o", {1: 100, 2: 100})
    values = [npv(flows, r).npv for r in ("0.01", "0.05", "0.10", "0.25")]
    assert values == sorted(values, reverse=True)
    assert len(set(values)) == len(values)


def test_year0_capital_ratio_in_comparison():
    comparison = compare_options(
        [option("buy", {0: 22869, 1: 1419}), option("elastic", {0: 9000, 1: 9000})],
        "0.05", reference="buy")
    by_label = {r.label: r for r in comparison.rows}
    ratio = by_label["elastic"].year0_ratio_vs_reference
    assert ratio is not None
    assert float(ratio) == pytest.approx(9000 / 22869, rel=1e-9)
