"""Cloud adoption decision support: cost simulation, NPV comparison, assessment."""

from .assessment import (
    Answer,
    NetBenefit,
    Recommendation,
    StakeholderEntry,
    SuitabilityChecklist,
    Verdict,
    aggregate_stakeholders,
    evaluate_suitability,
)
from .catalog import (
    PriceCatalog,
    PriceEntry,
    PriceScenario,
    Resource,
    load_catalog,
    load_scenario,
    price_lookup,
    reservation_charges,
)
from .engine import CostLine, CostReport, build_graph, group_breakdown, simulate
from .finance import (
    FinancialOption,
    NpvResult,
    OnPremisePlan,
    annualize,
    compare_options,
    npv,
    on_premise_cash_flows,
)
from .model import (
    DeploymentModel,
    Node,
    Violation,
    load_model,
    parse_model,
    serialize_model,
    validate,
)
from .patterns import (
    MonthWindow,
    Pattern,
    UsageSpec,
    YearMonth,
    daily_series,
    effective_baseline,
    month_quantity,
    parse_patterns,
)

__version__ = "0.1.0"
