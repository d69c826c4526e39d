#!/usr/bin/env python3
"""Reproduce the school migration comparison from the bundled fixtures.

Simulates the elastic and lease-equivalent deployments over six years from
September 2010, builds the on-premise purchase plan, and prints yearly costs,
NPVs at 5%, and the ranking under the -15% price-cut scenario. Optionally
writes the full HTML report.
"""

from __future__ import annotations

import argparse
from decimal import Decimal
from pathlib import Path

from cloudcost.catalog import load_catalog, load_scenario
from cloudcost.engine import simulate
from cloudcost.finance import FinancialOption, annualize, compare_options, npv, on_premise_cash_flows
from cloudcost.finance import load_plan
from cloudcost.model import load_model
from cloudcost.patterns import MonthWindow, YearMonth
from cloudcost.report import emit_html

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
WINDOW = MonthWindow(YearMonth.parse("2010-09"), YearMonth.parse("2016-08"))


def relabel(option: FinancialOption, label: str) -> FinancialOption:
    return FinancialOption(label=label, cash_flows=option.cash_flows, source=option.source)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rate", default="0.05", help="annual discount rate")
    parser.add_argument("--html", help="write the comparison report page here")
    args = parser.parse_args()
    rate = Decimal(args.rate)

    catalog = load_catalog(str(FIXTURES / "aws-2010-eu.prices.json"))
    cut15 = load_scenario(str(FIXTURES / "cut15.scenario.json"))
    elastic_model = load_model(str(FIXTURES / "school.cloudmodel.json"))
    lease_model = load_model(str(FIXTURES / "school-lease.cloudmodel.json"))
    plan = load_plan(str(FIXTURES / "school-buy.plan.json"))

    elastic_report = simulate(elastic_model, catalog, WINDOW)
    options = [
        on_premise_cash_flows(plan, len(WINDOW) // 12, label="buy"),
        relabel(annualize(simulate(lease_model, catalog, WINDOW), WINDOW.start), "lease"),
        relabel(annualize(elastic_report, WINDOW.start), "elastic"),
    ]

    print(f"yearly cost per option ({WINDOW.start} .. {WINDOW.end})")
    for option in options:
        flows = "  ".join(f"{v:>9.2f}" for _, v in sorted(option.cash_flows.items()))
        print(f"  {option.label:<8} {flows}")

    comparison = compare_options(options, rate, reference="buy")
    print(f"\nnpv at rate {rate} (ascending):")
    for row in comparison.rows:
        print(f"  {row.label:<8} {row.npv:>12.2f}  {row.pct_vs_reference * 100:>+7.1f}% vs buy"
              f"   year-0 outlay {row.year0:>9.2f}")

    cut_options = [
        options[0],
        relabel(annualize(simulate(lease_model, catalog, WINDOW, cut15), WINDOW.start), "lease"),
        relabel(annualize(simulate(elastic_model, catalog, WINDOW, cut15), WINDOW.start), "elastic"),
    ]
    cut_comparison = compare_options(cut_options, rate, reference="buy")
    print("\nwith a 15% instance+storage price cut from 2012-09:")
    for row in cut_comparison.rows:
        print(f"  {row.label:<8} {row.npv:>12.2f}  {row.pct_vs_reference * 100:>+7.1f}% vs buy")
    print(f"  cheapest: {cut_comparison.rows[0].label}")

    if args.html:
        npvs = [npv(o, rate) for o in options]
        Path(args.html).write_bytes(emit_html(
            elastic_report, npvs, comparison, options=options, model=elastic_model))
        print(f"\nwrote {args.html}")


if __name__ == "__main__":
    main()
