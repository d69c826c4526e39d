"""Independent brute-force interpreters used as test oracles.

These deliberately share no evaluation code with the package: pattern
evaluation walks real datetime.date objects day by day, and the cost oracle
re-derives every billing rule with plain float arithmetic.
"""

from __future__ import annotations

import datetime
import math

from cloudcost.catalog import PriceCatalog, PriceScenario, Resource, TRANSFER_SKU
from cloudcost.model import DeploymentModel, NodeKind, PurchaseMode
from cloudcost.patterns import DayScope, Mode, MonthWindow, Pattern, UsageSpec, YearMonth


def _clamp(value: float) -> float:
    return value if value > 0 else 0.0


def _apply(current: float, op: str, value: float) -> float:
    if op == "+":
        result = current + value
    elif op == "-":
        result = current - value
    elif op == "*":
        result = current * value
    elif op == "/":
        result = current / value
    elif op == "^":
        result = current ** value
    else:
        raise AssertionError(f"unknown op {op}")
    return _clamp(result)


def _day_matches(pattern: Pattern, date: datetime.date) -> bool:
    rule = pattern.days
    iso = date.isoweekday()
    if rule.scope in (DayScope.DEFAULT, DayScope.EVERYDAY):
        return True
    if rule.scope == DayScope.WEEKDAYS:
        return iso in (1, 2, 3, 4, 5)
    if rule.scope == DayScope.WEEKENDS:
        return iso in (6, 7)
    if rule.scope == DayScope.DAY_RANGE:
        return rule.lo <= date.day <= rule.hi
    if rule.scope == DayScope.WEEKDAY:
        return iso == rule.weekday
    raise AssertionError(f"unknown day scope {rule.scope}")


def oracle_effective_baseline(spec: UsageSpec, start: YearMonth, month: YearMonth) -> float:
    value = spec.baseline
    year, mon = start.year, start.month
    while (year, mon) < (month.year, month.month):
        for p in spec.patterns:
            if p.mode == Mode.PERM and mon in p.months:
                value = _apply(value, p.op, p.value)
        mon += 1
        if mon == 13:
            year, mon = year + 1, 1
    return value


def oracle_daily_series(spec: UsageSpec, start: YearMonth, month: YearMonth) -> list[float]:
    base = oracle_effective_baseline(spec, start, month)
    first = datetime.date(month.year, month.month, 1)
    if month.month == 12:
        next_first = datetime.date(month.year + 1, 1, 1)
    else:
        next_first = datetime.date(month.year, month.month + 1, 1)
    series = []
    date = first
    while date < next_first:
        value = base
        for p in spec.patterns:
            if p.mode == Mode.TEMP and month.month in p.months and _day_matches(p, date):
                value = _apply(value, p.op, p.value)
        series.append(value)
        date += datetime.timedelta(days=1)
    return series


def oracle_monthly_totals(model: DeploymentModel, catalog: PriceCatalog,
                          window: MonthWindow,
                          scenario: PriceScenario | None = None) -> dict:
    """Float re-derivation of the engine's monthly totals."""
    prices = {}
    for e in catalog.entries:
        prices[(e.provider, e.region, e.resource, e.sku, e.purchase_mode)] = e

    def unit_price(binding, resource, sku, mode, month):
        entry = prices[(binding.provider, binding.region, resource, sku, mode)]
        price = float(entry.unit_price)
        if scenario is not None:
            for adj in scenario.adjustments:
                if resource in adj.resources and adj.from_month <= month:
                    price *= float(adj.multiplier)
        return price

    totals = {m: 0.0 for m in window}

    for node in model.nodes:
        if node.kind == NodeKind.REMOTE_NODE:
            continue
        binding = model.provider_bindings.get(node.id)
        sku = node.storage_type if node.kind == NodeKind.VIRTUAL_STORAGE else node.server_type
        reserved_entry = None
        for month in window:
            if node.kind == NodeKind.VIRTUAL_MACHINE and not node.instance_count.is_zero:
                series = oracle_daily_series(node.instance_count, window.start, month)
                hours = sum(math.ceil(v) * 24 for v in series)
                if hours:
                    mode = binding.purchase_mode
                    totals[month] += hours * unit_price(
                        binding, Resource.INSTANCE_HOUR, sku, mode, month)
                    entry = prices[(binding.provider, binding.region,
                                    Resource.INSTANCE_HOUR, sku, mode)]
                    if mode == PurchaseMode.RESERVED:
                        reserved_entry = entry
            if node.kind in (NodeKind.VIRTUAL_STORAGE, NodeKind.DATABASE) and not node.size_gb.is_zero:
                series = oracle_daily_series(node.size_gb, window.start, month)
                gb_month = sum(series) / len(series)
                if gb_month:
                    totals[month] += gb_month * unit_price(
                        binding, Resource.STORAGE_GB_MONTH, sku, PurchaseMode.ON_DEMAND, month)
            for spec, resource in ((node.io_in_requests_per_month, Resource.INPUT_REQUEST),
                                   (node.io_out_requests_per_month, Resource.OUTPUT_REQUEST)):
                if spec.is_zero:
                    continue
                series = oracle_daily_series(spec, window.start, month)
                count = sum(series) / len(series)
                if count:
                    totals[month] += count * unit_price(
                        binding, resource, sku, PurchaseMode.ON_DEMAND, month)
        if reserved_entry is not None:
            offset = 0
            while offset < len(window):
                charge_month = window.start.plus(offset)
                series = oracle_daily_series(node.instance_count, window.start, charge_month)
                count = max(math.ceil(series[0]), 1)
                totals[charge_month] += count * float(reserved_entry.upfront_fee)
                offset += reserved_entry.term_months

    node_by_id = {n.id: n for n in model.nodes}
    for path in model.paths:
        to_node, from_node = node_by_id[path.to_node], node_by_id[path.from_node]
        bill = to_node if to_node.kind != NodeKind.REMOTE_NODE else from_node
        if bill.kind == NodeKind.REMOTE_NODE:
            continue
        binding = model.provider_bindings.get(bill.id)
        for month in window:
            for spec, resource in ((path.data_in_gb_per_month, Resource.DATA_IN_GB),
                                   (path.data_out_gb_per_month, Resource.DATA_OUT_GB)):
                if spec.is_zero:
                    continue
                series = oracle_daily_series(spec, window.start, month)
                gb = sum(series) / len(series)
                if gb:
                    totals[month] += gb * unit_price(
                        binding, resource, TRANSFER_SKU, PurchaseMode.ON_DEMAND, month)
    return totals
