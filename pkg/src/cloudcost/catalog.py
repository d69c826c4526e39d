"""Per-provider unit prices, reservation terms, and dated price-change scenarios.

Catalog files are UTF-8 JSON (extension ``.prices.json``, ``"schema": 1``).
Currency amounts are decimal strings so stored prices never pick up binary
floating-point drift.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Optional

from .model import PurchaseMode
from .patterns import MonthWindow, YearMonth

__all__ = [
    "Resource",
    "PriceEntry",
    "PriceCatalog",
    "ScenarioAdjustment",
    "PriceScenario",
    "CatalogError",
    "PriceNotFoundError",
    "load_catalog",
    "catalog_from_obj",
    "load_scenario",
    "scenario_from_obj",
    "price_lookup",
    "reservation_charges",
    "TRANSFER_SKU",
]

SCHEMA_VERSION = 1

# Communication paths carry no SKU of their own; transfer prices are keyed
# under this constant.
TRANSFER_SKU = "transfer"


class Resource(str, Enum):
    INSTANCE_HOUR = "instance-hour"
    STORAGE_GB_MONTH = "storage-gb-month"
    INPUT_REQUEST = "input-request"
    OUTPUT_REQUEST = "output-request"
    DATA_IN_GB = "data-in-gb"
    DATA_OUT_GB = "data-out-gb"


class CatalogError(ValueError):
    """Malformed or inconsistent price catalog."""


class PriceNotFoundError(LookupError):
    """No catalog entry matches the requested key."""

    def __init__(self, provider: str, region: str, resource: Resource, sku: str,
                 purchase_mode: PurchaseMode):
        self.key = (provider, region, resource.value, sku, purchase_mode.value)
        super().__init__("price not found: " + "/".join(self.key))


@dataclass(frozen=True)
class PriceEntry:
    provider: str
    region: str
    resource: Resource
    sku: str
    unit_price: Decimal
    currency: str = "USD"
    purchase_mode: PurchaseMode = PurchaseMode.ON_DEMAND
    upfront_fee: Optional[Decimal] = None
    term_months: Optional[int] = None
    cpu_ghz: Optional[float] = None  # instance sizing metadata for spec-based lookup
    ram_gb: Optional[float] = None

    def __post_init__(self) -> None:
        if self.unit_price < 0:
            raise CatalogError(f"negative price for {self.sku!r}")
        if self.purchase_mode == PurchaseMode.RESERVED:
            if self.upfront_fee is None or self.term_months is None:
                raise CatalogError(
                    f"reserved entry {self.sku!r} requires upfront_fee and term_months")
            if self.term_months <= 0:
                raise CatalogError(f"term_months must be positive for {self.sku!r}")

    @property
    def key(self) -> tuple:
        return (self.provider, self.region, self.resource, self.sku, self.purchase_mode)


@dataclass(frozen=True)
class PriceCatalog:
    entries: tuple[PriceEntry, ...]
    label: str = ""
    as_of: str = ""
    _index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        index = {}
        for e in self.entries:
            if e.key in index:
                raise CatalogError("duplicate price entry: " + "/".join(
                    (e.provider, e.region, e.resource.value, e.sku, e.purchase_mode.value)))
            index[e.key] = e
        object.__setattr__(self, "_index", index)

    def find(self, provider: str, region: str, resource: Resource, sku: str,
             purchase_mode: PurchaseMode) -> Optional[PriceEntry]:
        return self._index.get((provider, region, resource, sku, purchase_mode))

    def require(self, provider: str, region: str, resource: Resource, sku: str,
                purchase_mode: PurchaseMode) -> PriceEntry:
        entry = self.find(provider, region, resource, sku, purchase_mode)
        if entry is None:
            raise PriceNotFoundError(provider, region, resource, sku, purchase_mode)
        return entry

    def cheapest_instance_sku(self, provider: str, region: str,
                              purchase_mode: PurchaseMode,
                              cpu_ghz: float, ram_gb: float) -> Optional[str]:
        """Cheapest instance-hour SKU whose sizing metadata meets both minima."""
        candidates = [
            e for e in self.entries
            if e.resource == Resource.INSTANCE_HOUR
            and (e.provider, e.region, e.purchase_mode) == (provider, region, purchase_mode)
            and e.cpu_ghz is not None and e.ram_gb is not None
            and e.cpu_ghz >= cpu_ghz and e.ram_gb >= ram_gb
        ]
        if not candidates:
            return None
        return min(candidates, key=lambda e: (e.unit_price, e.sku)).sku

    def scale(self, factor: Decimal) -> "PriceCatalog":
        """A copy with every unit price (and upfront fee) multiplied by factor."""
        scaled = tuple(
            PriceEntry(
                provider=e.provider, region=e.region, resource=e.resource, sku=e.sku,
                unit_price=e.unit_price * factor, currency=e.currency,
                purchase_mode=e.purchase_mode,
                upfront_fee=None if e.upfront_fee is None else e.upfront_fee * factor,
                term_months=e.term_months, cpu_ghz=e.cpu_ghz, ram_gb=e.ram_gb,
            )
            for e in self.entries
        )
        return PriceCatalog(entries=scaled, label=self.label, as_of=self.as_of)


@dataclass(frozen=True)
class ScenarioAdjustment:
    resources: frozenset[Resource]
    multiplier: Decimal
    from_month: YearMonth

    def __post_init__(self) -> None:
        if self.multiplier <= 0:
            raise CatalogError(f"scenario multiplier must be positive, got {self.multiplier}")


@dataclass(frozen=True)
class PriceScenario:
    label: str
    adjustments: tuple[ScenarioAdjustment, ...] = ()


# --- loading -----------------------------------------------------------------

def load_catalog(path: str) -> PriceCatalog:
    with open(path, encoding="utf-8") as f:
        document = f.read()
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as e:
        raise CatalogError(f"catalog is not valid JSON: {e}") from None
    return catalog_from_obj(doc)


def catalog_from_obj(doc) -> PriceCatalog:
    if not isinstance(doc, dict):
        raise CatalogError("catalog document must be a JSON object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise CatalogError(f'catalog must declare "schema": {SCHEMA_VERSION}')
    entries = []
    raw_entries = doc.get("entries", [])
    if not isinstance(raw_entries, list):
        raise CatalogError('"entries" must be a list')
    for obj in raw_entries:
        entries.append(_entry_from_obj(obj))
    return PriceCatalog(entries=tuple(entries),
                        label=str(doc.get("label", "")),
                        as_of=str(doc.get("as_of", "")))


def _entry_from_obj(obj) -> PriceEntry:
    if not isinstance(obj, dict):
        raise CatalogError("price entry must be a JSON object")
    try:
        resource = Resource(obj["resource"])
    except KeyError:
        raise CatalogError("price entry missing 'resource'") from None
    except ValueError:
        raise CatalogError(f"unknown resource kind {obj['resource']!r}") from None
    try:
        mode = PurchaseMode(obj.get("purchase_mode", "on-demand"))
    except ValueError:
        raise CatalogError(f"unknown purchase mode {obj['purchase_mode']!r}") from None
    return PriceEntry(
        provider=str(obj.get("provider", "")),
        region=str(obj.get("region", "")),
        resource=resource,
        sku=str(obj.get("sku", "")),
        unit_price=_money(obj.get("unit_price"), "unit_price"),
        currency=str(obj.get("currency", "USD")),
        purchase_mode=mode,
        upfront_fee=None if obj.get("upfront_fee") is None
        else _money(obj.get("upfront_fee"), "upfront_fee"),
        term_months=obj.get("term_months"),
        cpu_ghz=None if obj.get("cpu_ghz") is None else float(obj["cpu_ghz"]),
        ram_gb=None if obj.get("ram_gb") is None else float(obj["ram_gb"]),
    )


def _money(value, what: str) -> Decimal:
    if isinstance(value, bool) or value is None:
        raise CatalogError(f"{what} must be a decimal string or number")
    try:
        return Decimal(str(value))
    except InvalidOperation:
        raise CatalogError(f"{what} is not a valid decimal: {value!r}") from None


def load_scenario(path: str) -> PriceScenario:
    with open(path, encoding="utf-8") as f:
        document = f.read()
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as e:
        raise CatalogError(f"scenario is not valid JSON: {e}") from None
    return scenario_from_obj(doc)


def scenario_from_obj(doc) -> PriceScenario:
    if not isinstance(doc, dict):
        raise CatalogError("scenario document must be a JSON object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise CatalogError(f'scenario must declare "schema": {SCHEMA_VERSION}')
    adjustments = []
    for obj in doc.get("adjustments", []):
        try:
            resources = frozenset(Resource(r) for r in obj["resources"])
        except (KeyError, TypeError):
            raise CatalogError("scenario adjustment requires a 'resources' list") from None
        except ValueError as e:
            raise CatalogError(f"unknown resource in scenario: {e}") from None
        adjustments.append(ScenarioAdjustment(
            resources=resources,
            multiplier=_money(obj.get("multiplier"), "multiplier"),
            from_month=YearMonth.parse(str(obj.get("from_month"))),
        ))
    return PriceScenario(label=str(doc.get("label", "")),
                         adjustments=tuple(adjustments))


# --- lookups -----------------------------------------------------------------

def price_lookup(catalog: PriceCatalog, provider: str, region: str, resource: Resource,
                 sku: str, purchase_mode: PurchaseMode, month: YearMonth,
                 scenario: Optional[PriceScenario] = None) -> Decimal:
    """Unit price for a key in a given month: base price times the product of
    every scenario multiplier covering this resource whose from_month <= month.
    """
    entry = catalog.require(provider, region, resource, sku, purchase_mode)
    price = entry.unit_price
    if scenario is not None:
        for adj in scenario.adjustments:
            if resource in adj.resources and adj.from_month <= month:
                price *= adj.multiplier
    return price


def reservation_charges(entry: PriceEntry, window: MonthWindow) -> list[tuple[YearMonth, Decimal]]:
    """Upfront fee events: at window start and at every term boundary inside it."""
    if entry.purchase_mode != PurchaseMode.RESERVED:
        raise ValueError("reservation_charges requires a reserved price entry")
    assert entry.upfront_fee is not None and entry.term_months is not None
    charges = []
    offset = 0
    while offset < len(window):
        charges.append((window.start.plus(offset), entry.upfront_fee))
        offset += entry.term_months
    return charges
