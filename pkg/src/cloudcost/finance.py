"""Cash-flow schedules and net present value comparison of deployment options.

Costs are treated as outgoing flows only; discounting is annual with year 0
undiscounted: discounted(Y) = C / (1 + rate)^Y.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Context, Decimal, localcontext
from typing import Optional, Sequence

from .engine import CostReport
from .patterns import YearMonth

__all__ = [
    "FinancialOption",
    "OnPremisePlan",
    "ServerClass",
    "NpvResult",
    "ComparisonRow",
    "Comparison",
    "FinanceError",
    "annualize",
    "on_premise_cash_flows",
    "load_plan",
    "plan_from_obj",
    "npv",
    "compare_options",
]

_NPV_CONTEXT = Context(prec=34)


class FinanceError(ValueError):
    pass


@dataclass(frozen=True)
class FinancialOption:
    label: str
    cash_flows: dict  # year index (0-based) -> Decimal annual cost
    source: str = "cloud-report"  # or "on-premise"

    def __post_init__(self) -> None:
        for year, flow in self.cash_flows.items():
            if flow < 0:
                raise FinanceError(f"{self.label}: cash flow for year {year} is negative")

    @property
    def horizon_years(self) -> int:
        return max(self.cash_flows) + 1 if self.cash_flows else 0

    @property
    def year0_capital(self) -> Decimal:
        return self.cash_flows.get(0, Decimal(0))


@dataclass(frozen=True)
class ServerClass:
    label: str
    unit_capital: Decimal
    count: int
    electricity_per_year: Decimal

    def __post_init__(self) -> None:
        if self.count < 1:
            raise FinanceError(f"server class {self.label!r} needs count >= 1")


@dataclass(frozen=True)
class OnPremisePlan:
    server_classes: tuple[ServerClass, ...]
    upgrade_cycle_years: int

    def __post_init__(self) -> None:
        if self.upgrade_cycle_years < 1:
            raise FinanceError("upgrade_cycle_years must be >= 1")


@dataclass(frozen=True)
class NpvResult:
    label: str
    rate: Decimal
    npv: Decimal
    per_year_discounted: dict  # year -> Decimal


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    npv: Decimal
    pct_vs_reference: Decimal  # (npv - npv_ref) / npv_ref
    year0: Decimal
    year0_ratio_vs_reference: Optional[Decimal]


@dataclass(frozen=True)
class Comparison:
    reference: str
    rate: Decimal
    rows: tuple[ComparisonRow, ...]  # ascending by npv, ties by label


def annualize(report: CostReport, window_start: YearMonth) -> FinancialOption:
    """Roll a monthly report into yearly flows: year Y = months 12Y..12Y+11."""
    if report.window.start != window_start:
        raise FinanceError(
            f"report window starts {report.window.start}, expected {window_start}")
    months = list(report.window)
    if len(months) % 12 != 0:
        raise FinanceError(
            f"window not year-aligned: {len(months)} months from {window_start}")
    flows = {}
    for year in range(len(months) // 12):
        flows[year] = sum((report.monthly_totals[m] for m in months[12 * year:12 * year + 12]),
                          Decimal(0))
    return FinancialOption(label=report.model_name, cash_flows=flows, source="cloud-report")


def on_premise_cash_flows(plan: OnPremisePlan, horizon_years: int,
                          label: str = "on-premise") -> FinancialOption:
    """Capital at year 0 and at every upgrade-cycle boundary; electricity yearly."""
    if horizon_years < 1:
        raise FinanceError("horizon_years must be >= 1")
    capital = sum((sc.unit_capital * sc.count for sc in plan.server_classes), Decimal(0))
    electricity = sum((sc.electricity_per_year * sc.count for sc in plan.server_classes),
                      Decimal(0))
    flows = {}
    for year in range(horizon_years):
        flow = electricity
        if year % plan.upgrade_cycle_years == 0:
            flow += capital
        flows[year] = flow
    return FinancialOption(label=label, cash_flows=flows, source="on-premise")


def load_plan(path: str) -> OnPremisePlan:
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    return plan_from_obj(doc)


def plan_from_obj(doc) -> OnPremisePlan:
    if not isinstance(doc, dict):
        raise FinanceError("plan document must be a JSON object")
    classes = []
    for obj in doc.get("server_classes", []):
        classes.append(ServerClass(
            label=str(obj.get("label", "")),
            unit_capital=Decimal(str(obj["unit_capital"])),
            count=int(obj["count"]),
            electricity_per_year=Decimal(str(obj.get("electricity_per_year", 0))),
        ))
    if not classes:
        raise FinanceError("plan declares no server classes")
    return OnPremisePlan(server_classes=tuple(classes),
                         upgrade_cycle_years=int(doc.get("upgrade_cycle_years", 3)))


_DISCOUNT_QUANTUM = Decimal("1e-12")


def npv(option: FinancialOption, rate) -> NpvResult:
    """Discount each yearly flow by (1 + rate)^Y and sum.

    Discounted values are fixed at 12 decimal places so the npv equals the
    plain sum of the per-year values under any decimal context.
    """
    r = Decimal(str(rate))
    if r <= -1:
        raise FinanceError(f"rate must exceed -1, got {r}")
    with localcontext(_NPV_CONTEXT):
        per_year = {}
        total = Decimal(0)
        for year in sorted(option.cash_flows):
            flow = option.cash_flows[year]
            discounted = flow if year == 0 else flow / (1 + r) ** year
            discounted = discounted.quantize(_DISCOUNT_QUANTUM)
            per_year[year] = discounted
            total += discounted
    return NpvResult(label=option.label, rate=r, npv=total, per_year_discounted=per_year)


def compare_options(options: Sequence[FinancialOption], rate,
                    reference: str) -> Comparison:
    """Rank options ascending by NPV with percentage differences vs a reference."""
    if len(options) < 2:
        raise FinanceError("need >= 2 options to compare")
    labels = [o.label for o in options]
    if reference not in labels:
        raise FinanceError(f"reference option {reference!r} not among {labels}")
    results = {o.label: npv(o, rate) for o in options}
    ref_npv = results[reference].npv
    ref_year0 = next(o for o in options if o.label == reference).year0_capital
    rows = []
    with localcontext(_NPV_CONTEXT):
        for option in options:
            result = results[option.label]
            pct = ((result.npv - ref_npv) / ref_npv) if ref_npv != 0 else Decimal(0)
            year0_ratio = (option.year0_capital / ref_year0) if ref_year0 != 0 else None
            rows.append(ComparisonRow(
                label=option.label,
                npv=result.npv,
                pct_vs_reference=pct,
                year0=option.year0_capital,
                year0_ratio_vs_reference=year0_ratio,
            ))
    rows.sort(key=lambda row: (row.npv, row.label))
    return Comparison(reference=reference, rate=Decimal(str(rate)), rows=tuple(rows))
