"""Cost graph construction and month-by-month cost simulation.

Billing rules:

* instance hours: per day, instance counts are ceiled (fractional machines
  cannot be leased) and expanded to 24 hours, then summed over the month;
* storage: GB-month is the average of the daily GB series (daily proration);
* requests and transfer: the baseline is a monthly quantity, so each day
  consumes 1/len(month) of the rate in effect that day — the monthly total
  is the mean of the daily series, which prorates day-scoped temp patterns;
* reserved capacity: the upfront fee recurs at every term boundary and is
  emitted as a quantity-1 line priced at fee x reserved instance count.

Currency amounts accumulate as exact decimals; rounding to cents happens
only at report emission.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Context, Decimal, localcontext
from typing import Optional

from .catalog import (
    PriceCatalog,
    PriceEntry,
    PriceScenario,
    Resource,
    TRANSFER_SKU,
    price_lookup,
    reservation_charges,
)
from .model import (
    DeploymentModel,
    Node,
    NodeKind,
    ProviderBinding,
    PurchaseMode,
    validate,
)
from .patterns import (
    Aggregation,
    MonthWindow,
    SimulationError,
    UsageSpec,
    YearMonth,
    daily_series,
    month_quantity,
)

__all__ = [
    "CostGraph",
    "CostVertex",
    "CostEdge",
    "CostLine",
    "CostReport",
    "EngineError",
    "RESERVATION_UPFRONT",
    "UNGROUPED",
    "build_graph",
    "simulate",
    "group_breakdown",
]

# Pseudo-resource label for reservation upfront fees in cost lines.
RESERVATION_UPFRONT = "reservation-upfront"
UNGROUPED = "ungrouped"

# Wide enough that quantity x price x multiplier products stay exact and
# totals never round; report emission quantizes to cents.
_MONEY_CONTEXT = Context(prec=50)

_UNITS = {
    Resource.INSTANCE_HOUR: "hour",
    Resource.STORAGE_GB_MONTH: "gb-month",
    Resource.INPUT_REQUEST: "request",
    Resource.OUTPUT_REQUEST: "request",
    Resource.DATA_IN_GB: "gb",
    Resource.DATA_OUT_GB: "gb",
}


class EngineError(RuntimeError):
    """Simulation cannot proceed (invalid model, unbound node, overflow)."""


@dataclass(frozen=True)
class CostVertex:
    node: Node
    binding: Optional[ProviderBinding]
    group_id: Optional[str]

    @property
    def billable(self) -> bool:
        return self.node.billable


@dataclass(frozen=True)
class CostEdge:
    path_id: str
    from_node: Node
    to_node: Node
    data_in: UsageSpec
    data_out: UsageSpec

    @property
    def billing_node(self) -> Optional[Node]:
        """Transfer is billed against the cloud-side endpoint."""
        if self.to_node.billable:
            return self.to_node
        if self.from_node.billable:
            return self.from_node
        return None


@dataclass(frozen=True)
class CostGraph:
    vertices: tuple[CostVertex, ...]
    edges: tuple[CostEdge, ...]


@dataclass(frozen=True)
class CostLine:
    month: YearMonth
    element_id: str
    resource: str
    quantity: float
    unit: str
    unit_price: Decimal
    cost: Decimal
    group_id: Optional[str] = None


@dataclass(frozen=True)
class CostReport:
    lines: tuple[CostLine, ...]
    monthly_totals: dict
    group_totals: dict
    window: MonthWindow
    model_name: str
    catalog_label: str
    scenario_label: Optional[str] = None
    currency: str = "USD"

    def total(self) -> Decimal:
        return sum(self.monthly_totals.values(), Decimal(0))


def build_graph(model: DeploymentModel) -> CostGraph:
    """Project a validated model onto its cost graph (bijective on elements)."""
    violations = validate(model)
    if violations:
        raise EngineError("model is invalid: " + "; ".join(str(v) for v in violations))
    nodes = {n.id: n for n in model.nodes}
    vertices = tuple(
        CostVertex(node=n,
                   binding=model.provider_bindings.get(n.id),
                   group_id=(g.id if (g := model.group_of(n.id)) else None))
        for n in model.nodes
    )
    edges = tuple(
        CostEdge(path_id=p.id,
                 from_node=nodes[p.from_node],
                 to_node=nodes[p.to_node],
                 data_in=p.data_in_gb_per_month,
                 data_out=p.data_out_gb_per_month)
        for p in model.paths
    )
    return CostGraph(vertices=vertices, edges=edges)


def simulate(model: DeploymentModel, catalog: PriceCatalog, window: MonthWindow,
             scenario: Optional[PriceScenario] = None) -> CostReport:
    """Month-by-month cost report for a model under a catalog and scenario."""
    graph = build_graph(model)
    with localcontext(_MONEY_CONTEXT):
        return _simulate_graph(model, graph, catalog, window, scenario)


def _simulate_graph(model: DeploymentModel, graph: CostGraph, catalog: PriceCatalog,
                    window: MonthWindow, scenario: Optional[PriceScenario]) -> CostReport:
    lines: list[CostLine] = []
    currencies: set[str] = set()

    for vertex in graph.vertices:
        if vertex.billable:
            lines.extend(_vertex_lines(vertex, catalog, window, scenario, currencies))
    for edge in graph.edges:
        lines.extend(_edge_lines(model, edge, catalog, window, scenario, currencies))

    if len(currencies) > 1:
        raise EngineError(f"catalog entries mix currencies: {sorted(currencies)}")
    currency = currencies.pop() if currencies else "USD"

    lines.sort(key=lambda l: (l.month, l.element_id, l.resource))

    monthly_totals: dict[YearMonth, Decimal] = {m: Decimal(0) for m in window}
    group_totals: dict[tuple[str, YearMonth], Decimal] = {}
    for line in lines:
        monthly_totals[line.month] += line.cost
        group_key = (line.group_id or UNGROUPED, line.month)
        group_totals[group_key] = group_totals.get(group_key, Decimal(0)) + line.cost

    return CostReport(
        lines=tuple(lines),
        monthly_totals=monthly_totals,
        group_totals=group_totals,
        window=window,
        model_name=model.name,
        catalog_label=catalog.label,
        scenario_label=scenario.label if scenario else None,
        currency=currency,
    )


def _vertex_lines(vertex: CostVertex, catalog: PriceCatalog, window: MonthWindow,
                  scenario: Optional[PriceScenario], currencies: set) -> list[CostLine]:
    node = vertex.node
    lines: list[CostLine] = []
    reserved_entry: Optional[PriceEntry] = None
    sku: Optional[str] = None

    for month in window:
        quantities = _vertex_quantities(node, window.start, month)
        hourly_database = node.kind == NodeKind.DATABASE and vertex.binding is not None
        if not quantities and not hourly_database:
            continue
        binding = vertex.binding
        if binding is None:
            raise EngineError(f"node {node.id!r} has billable usage but no provider binding")
        if sku is None:
            sku = _resolve_sku(node, binding, catalog)

        for resource, quantity in quantities:
            price = price_lookup(catalog, binding.provider, binding.region, resource,
                                 sku, _mode_for(resource, binding), month, scenario)
            entry = catalog.require(binding.provider, binding.region, resource, sku,
                                    _mode_for(resource, binding))
            currencies.add(entry.currency)
            lines.append(_line(month, node.id, resource.value, quantity,
                               _UNITS[resource], price, vertex.group_id))
            if resource == Resource.INSTANCE_HOUR and entry.purchase_mode == PurchaseMode.RESERVED:
                reserved_entry = entry

        if node.kind == NodeKind.DATABASE:
            lines.extend(_database_hour_lines(node, binding, sku, catalog, window,
                                              month, scenario, currencies, vertex.group_id))

    if reserved_entry is not None:
        lines.extend(_reservation_lines(node, reserved_entry, window, vertex.group_id))
    return lines


def _vertex_quantities(node: Node, start: YearMonth,
                       month: YearMonth) -> list[tuple[Resource, float]]:
    """Non-zero (resource, quantity) pairs for one node in one month."""
    try:
        quantities = []
        if node.kind == NodeKind.VIRTUAL_MACHINE and not node.instance_count.is_zero:
            series = daily_series(node.instance_count, start, month)
            hours = float(sum(math.ceil(v) * 24 for v in series))
            quantities.append((Resource.INSTANCE_HOUR, hours))
        if node.kind in (NodeKind.VIRTUAL_STORAGE, NodeKind.DATABASE) and not node.size_gb.is_zero:
            series = daily_series(node.size_gb, start, month)
            quantities.append(
                (Resource.STORAGE_GB_MONTH, month_quantity(series, Aggregation.AVERAGE)))
        for spec, resource in ((node.io_in_requests_per_month, Resource.INPUT_REQUEST),
                               (node.io_out_requests_per_month, Resource.OUTPUT_REQUEST)):
            if not spec.is_zero:
                series = daily_series(spec, start, month)
                quantities.append((resource, month_quantity(series, Aggregation.AVERAGE)))
        return [(r, q) for r, q in quantities if q != 0.0]
    except SimulationError as e:
        raise EngineError(f"node {node.id!r}, month {month}: {e}") from None


def _database_hour_lines(node: Node, binding: ProviderBinding, sku: str,
                         catalog: PriceCatalog, window: MonthWindow, month: YearMonth,
                         scenario: Optional[PriceScenario], currencies: set,
                         group_id: Optional[str]) -> list[CostLine]:
    # hosted databases bill an always-on hourly rate when the catalog has one
    entry = catalog.find(binding.provider, binding.region, Resource.INSTANCE_HOUR,
                         sku, binding.purchase_mode)
    if entry is None:
        return []
    currencies.add(entry.currency)
    price = price_lookup(catalog, binding.provider, binding.region, Resource.INSTANCE_HOUR,
                         sku, binding.purchase_mode, month, scenario)
    hours = float(month.days * 24)
    return [_line(month, node.id, Resource.INSTANCE_HOUR.value, hours, "hour", price, group_id)]


def _reservation_lines(node: Node, entry: PriceEntry, window: MonthWindow,
                       group_id: Optional[str]) -> list[CostLine]:
    lines = []
    for charge_month, fee in reservation_charges(entry, window):
        series = daily_series(node.instance_count, window.start, charge_month)
        count = max(math.ceil(month_quantity(series, Aggregation.POINT)), 1)
        lines.append(_line(charge_month, node.id, RESERVATION_UPFRONT, 1.0, "term",
                           fee * count, group_id))
    return lines


def _edge_lines(model: DeploymentModel, edge: CostEdge, catalog: PriceCatalog,
                window: MonthWindow, scenario: Optional[PriceScenario],
                currencies: set) -> list[CostLine]:
    billing_node = edge.billing_node
    if billing_node is None:
        return []  # both endpoints outside the cloud: nothing to bill
    lines = []
    for month in window:
        for spec, resource in ((edge.data_in, Resource.DATA_IN_GB),
                               (edge.data_out, Resource.DATA_OUT_GB)):
            if spec.is_zero:
                continue
            try:
                series = daily_series(spec, window.start, month)
            except SimulationError as e:
                raise EngineError(f"path {edge.path_id!r}, month {month}: {e}") from None
            quantity = month_quantity(series, Aggregation.AVERAGE)
            if quantity == 0.0:
                continue
            binding = model.provider_bindings.get(billing_node.id)
            if binding is None:
                raise EngineError(
                    f"path {edge.path_id!r} needs a provider binding on node "
                    f"{billing_node.id!r} to price its transfer")
            entry = catalog.require(binding.provider, binding.region, resource,
                                    TRANSFER_SKU, PurchaseMode.ON_DEMAND)
            currencies.add(entry.currency)
            price = price_lookup(catalog, binding.provider, binding.region, resource,
                                 TRANSFER_SKU, PurchaseMode.ON_DEMAND, month, scenario)
            lines.append(_line(month, edge.path_id, resource.value, quantity,
                               _UNITS[resource], price, None))
    return lines


def _resolve_sku(node: Node, binding: ProviderBinding, catalog: PriceCatalog) -> str:
    if node.sku is not None:
        return node.sku
    if node.specs is not None:
        sku = catalog.cheapest_instance_sku(binding.provider, binding.region,
                                            binding.purchase_mode,
                                            node.specs.cpu_ghz, node.specs.ram_gb)
        if sku is None:
            raise EngineError(
                f"no instance type in catalog satisfies specs of node {node.id!r} "
                f"(cpu >= {node.specs.cpu_ghz} GHz, ram >= {node.specs.ram_gb} GB)")
        return sku
    raise EngineError(f"node {node.id!r} declares neither a SKU nor server specs")


def _mode_for(resource: Resource, binding: ProviderBinding) -> PurchaseMode:
    # reservations apply to compute hours; storage and requests are metered
    if resource == Resource.INSTANCE_HOUR:
        return binding.purchase_mode
    return PurchaseMode.ON_DEMAND


def _line(month: YearMonth, element_id: str, resource: str, quantity: float, unit: str,
          unit_price: Decimal, group_id: Optional[str]) -> CostLine:
    cost = Decimal(str(quantity)) * unit_price
    return CostLine(month=month, element_id=element_id, resource=resource,
                    quantity=quantity, unit=unit, unit_price=unit_price, cost=cost,
                    group_id=group_id)


def group_breakdown(report: CostReport, model: DeploymentModel) -> dict[str, list[Decimal]]:
    """Per-group monthly cost series; all groups plus the ungrouped bucket
    sum to the report's monthly totals.
    """
    months = list(report.window)
    series: dict[str, list[Decimal]] = {}
    for g in model.groups:
        series[g.id] = [report.group_totals.get((g.id, m), Decimal(0)) for m in months]
    ungrouped = [report.group_totals.get((UNGROUPED, m), Decimal(0)) for m in months]
    if any(v != 0 for v in ungrouped) or not model.groups:
        series[UNGROUPED] = ungrouped
    return series
