#!/usr/bin/env python3
"""Sweep the provider price multiplier and find where the elastic option
overtakes buying physical servers.

For each multiplier applied to instance-hour and storage prices from a given
month, prints the elastic and buy NPVs and marks the crossover.
"""

from __future__ import annotations

import argparse
from decimal import Decimal
from pathlib import Path

from cloudcost.catalog import PriceScenario, Resource, ScenarioAdjustment, load_catalog
from cloudcost.engine import simulate
from cloudcost.finance import annualize, load_plan, npv, on_premise_cash_flows
from cloudcost.model import load_model
from cloudcost.patterns import MonthWindow, YearMonth

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
WINDOW = MonthWindow(YearMonth.parse("2010-09"), YearMonth.parse("2016-08"))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--from-month", default="2012-09",
                        help="month the price change takes effect")
    parser.add_argument("--rate", default="0.05")
    parser.add_argument("--steps", type=int, default=13,
                        help="multipliers from 0.70 to 1.30 inclusive")
    args = parser.parse_args()
    rate = Decimal(args.rate)
    from_month = YearMonth.parse(args.from_month)

    catalog = load_catalog(str(FIXTURES / "aws-2010-eu.prices.json"))
    model = load_model(str(FIXTURES / "school.cloudmodel.json"))
    plan = load_plan(str(FIXTURES / "school-buy.plan.json"))
    buy_npv = npv(on_premise_cash_flows(plan, len(WINDOW) // 12, label="buy"), rate).npv

    print(f"buy npv: {buy_npv:.2f}   price change effective {from_month}")
    print("multiplier   elastic npv   cheaper")
    for step in range(args.steps):
        multiplier = Decimal("0.70") + Decimal("0.05") * step
        scenario = PriceScenario(label=f"x{multiplier}", adjustments=(
            ScenarioAdjustment(
                resources=frozenset({Resource.INSTANCE_HOUR, Resource.STORAGE_GB_MONTH}),
                multiplier=multiplier, from_month=from_month),))
        report = simulate(model, catalog, WINDOW, scenario)
        elastic_npv = npv(annualize(report, WINDOW.start), rate).npv
        winner = "elastic" if elastic_npv < buy_npv else "buy"
        print(f"  x{multiplier}      {elastic_npv:>12.2f}   {winner}")


if __name__ == "__main__":
    main()
