"""Command-line entry point.

Exit codes: 0 success, 1 internal error, 2 user-input error. Diagnostics go
to stderr; data goes to files or stdout.
"""

from __future__ import annotations

import argparse
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Optional, Sequence

from .assessment import AssessmentError, aggregate_stakeholders, evaluate_suitability, load_assessment
from .catalog import CatalogError, PriceNotFoundError, PriceScenario, load_catalog, load_scenario
from .engine import EngineError, simulate
from .finance import (
    FinanceError,
    FinancialOption,
    annualize,
    compare_options,
    load_plan,
    npv,
    on_premise_cash_flows,
)
from .model import ModelError, load_model
from .patterns import MonthWindow, PatternSyntaxError, YearMonth
from .report import emit_csv, emit_html, emit_json

USER_ERROR = 2


class CliError(Exception):
    """User-input problem; rendered as a diagnostic with exit code 2."""


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))


def main(argv: Sequence[str]) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return USER_ERROR
    try:
        return args.handler(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return USER_ERROR
    except (ModelError, CatalogError, FinanceError, AssessmentError, EngineError,
            PatternSyntaxError, PriceNotFoundError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USER_ERROR
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {e}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cloudcost",
        description="Simulate cloud deployment costs and compare adoption options.")
    sub = parser.add_subparsers(dest="command")
    parser.set_defaults(command=None)

    sim = sub.add_parser("simulate", help="simulate one model over a window")
    sim.add_argument("--model", required=True, help="deployment model (.cloudmodel.json)")
    sim.add_argument("--catalog", required=True, help="price catalog (.prices.json)")
    sim.add_argument("--scenario", help="price scenario (.scenario.json)")
    sim.add_argument("--from", dest="window_from", required=True, metavar="YYYY-MM")
    sim.add_argument("--to", dest="window_to", required=True, metavar="YYYY-MM")
    sim.add_argument("--discount-rate", default="0.05", help="annual rate (default 0.05)")
    sim.add_argument("--csv", help="write the cost table here")
    sim.add_argument("--json", help="write the machine-readable report here")
    sim.add_argument("--html", help="write the report page here")
    sim.set_defaults(handler=cmd_simulate)

    cmp_ = sub.add_parser("compare", help="compare options by net present value")
    cmp_.add_argument("--option", action="append", default=[], metavar="LABEL=MODEL",
                      help="cloud option: label and model path (repeatable)")
    cmp_.add_argument("--plan", metavar="LABEL=PLAN",
                      help="on-premise purchase plan: label and plan path")
    cmp_.add_argument("--catalog", required=True)
    cmp_.add_argument("--scenario")
    cmp_.add_argument("--from", dest="window_from", required=True, metavar="YYYY-MM")
    cmp_.add_argument("--to", dest="window_to", required=True, metavar="YYYY-MM")
    cmp_.add_argument("--discount-rate", default="0.05")
    cmp_.add_argument("--reference", help="reference option label (default: the plan)")
    cmp_.add_argument("--json", help="write the comparison as JSON here")
    cmp_.add_argument("--html", help="write the comparison page here")
    cmp_.set_defaults(handler=cmd_compare)

    assess = sub.add_parser("assess", help="evaluate a suitability assessment file")
    assess.add_argument("assessment", help="assessment file (.assessment.json)")
    assess.set_defaults(handler=cmd_assess)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--addr", help="listen address host:port (or CLOUDCOST_ADDR)")
    serve.add_argument("--catalog-dir", help="directory of .prices.json catalogs")
    serve.add_argument("--report-dir", help="directory for stored reports")
    serve.set_defaults(handler=cmd_serve)
    return parser


def _parse_window(args) -> MonthWindow:
    try:
        start = YearMonth.parse(args.window_from)
        end = YearMonth.parse(args.window_to)
    except ValueError as e:
        raise CliError(str(e)) from None
    if start > end:
        raise CliError(f"--from {start} is after --to {end}")
    return MonthWindow(start, end)


def _parse_rate(text: str) -> Decimal:
    try:
        rate = Decimal(text)
    except InvalidOperation:
        raise CliError(f"bad discount rate {text!r}") from None
    if rate <= -1:
        raise CliError("discount rate must exceed -1")
    return rate


def _load_scenario_arg(path: Optional[str]) -> Optional[PriceScenario]:
    return load_scenario(path) if path else None


def cmd_simulate(args) -> int:
    window = _parse_window(args)
    rate = _parse_rate(args.discount_rate)
    model = load_model(args.model)
    catalog = load_catalog(args.catalog)
    scenario = _load_scenario_arg(args.scenario)
    report = simulate(model, catalog, window, scenario)

    npv_results = []
    options = []
    if len(window) % 12 == 0:
        option = annualize(report, window.start)
        options.append(option)
        npv_results.append(npv(option, rate))

    wrote = False
    if args.csv:
        Path(args.csv).write_bytes(emit_csv(report))
        wrote = True
    if args.json:
        Path(args.json).write_bytes(emit_json(report, npv_results))
        wrote = True
    if args.html:
        Path(args.html).write_bytes(
            emit_html(report, npv_results, options=options, model=model))
        wrote = True
    if not wrote:
        sys.stdout.buffer.write(emit_json(report, npv_results))
        sys.stdout.buffer.write(b"\n")
    total = sum(report.monthly_totals.values())
    print(f"simulated {model.name}: {len(window)} months, total {total:.2f} "
          f"{report.currency}", file=sys.stderr)
    return 0


def _split_labeled(value: str, what: str) -> tuple[str, str]:
    label, sep, path = value.partition("=")
    if not sep or not label or not path:
        raise CliError(f"{what} must look like LABEL=PATH, got {value!r}")
    return label, path


def cmd_compare(args) -> int:
    window = _parse_window(args)
    rate = _parse_rate(args.discount_rate)
    if len(window) % 12 != 0:
        raise CliError(f"window not year-aligned: {len(window)} months")
    horizon_years = len(window) // 12

    catalog = load_catalog(args.catalog)
    scenario = _load_scenario_arg(args.scenario)

    options: list[FinancialOption] = []
    reports = {}
    models = {}
    for value in args.option:
        label, path = _split_labeled(value, "--option")
        model = load_model(path)
        report = simulate(model, catalog, window, scenario)
        option = annualize(report, window.start)
        option = FinancialOption(label=label, cash_flows=option.cash_flows,
                                 source="cloud-report")
        options.append(option)
        reports[label] = report
        models[label] = model
    plan_label = None
    if args.plan:
        plan_label, plan_path = _split_labeled(args.plan, "--plan")
        plan = load_plan(plan_path)
        options.append(on_premise_cash_flows(plan, horizon_years, label=plan_label))
    if len(options) < 2:
        raise CliError(f"need >= 2 options to compare, got {len(options)}")

    reference = args.reference or plan_label or options[0].label
    comparison = compare_options(options, rate, reference)
    npv_results = [npv(o, rate) for o in options]

    _print_comparison(options, npv_results, comparison)
    if args.json:
        Path(args.json).write_bytes(_comparison_json(options, npv_results, comparison))
    if args.html and reports:
        first = options[0].label
        Path(args.html).write_bytes(emit_html(
            reports[first], npv_results, comparison, options=options, model=models[first]))
    return 0


def _print_comparison(options, npv_results, comparison) -> None:
    horizon = max(o.horizon_years for o in options)
    flows = {o.label: o.cash_flows for o in options}
    header = ["option"] + [f"year {y}" for y in range(horizon)] + ["npv", "vs ref"]
    print("\t".join(header))
    npv_by_label = {r.label: r.npv for r in npv_results}
    pct = {row.label: row.pct_vs_reference for row in comparison.rows}
    for row in comparison.rows:
        cells = [row.label]
        cells += [f"{flows[row.label].get(y, Decimal(0)):.2f}" for y in range(horizon)]
        cells.append(f"{npv_by_label[row.label]:.2f}")
        cells.append(f"{pct[row.label] * 100:+.1f}%")
        print("\t".join(cells))


def _comparison_json(options, npv_results, comparison) -> bytes:
    import json as _json
    obj = {
        "schema": 1,
        "reference": comparison.reference,
        "rate": str(comparison.rate),
        "options": [{
            "label": o.label,
            "source": o.source,
            "cash_flows": {str(y): str(v) for y, v in o.cash_flows.items()},
        } for o in options],
        "npv": [{"label": r.label, "npv": str(r.npv)} for r in npv_results],
        "ranking": [{
            "label": row.label,
            "npv": str(row.npv),
            "pct_vs_reference": str(row.pct_vs_reference),
            "year0": str(row.year0),
        } for row in comparison.rows],
    }
    return _json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def cmd_assess(args) -> int:
    from .assessment import NetBenefit

    checklist, stakeholders = load_assessment(args.assessment)
    recommendation = evaluate_suitability(checklist)
    print(recommendation.verdict.value)
    for item in recommendation.blocking_items:
        print(f"  - {item}")
    if stakeholders:
        summary = aggregate_stakeholders(stakeholders)
        for benefit in (NetBenefit.POSITIVE, NetBenefit.ZERO, NetBenefit.NEGATIVE):
            names = summary.by_benefit.get(benefit, [])
            if names:
                print(f"{benefit.value} net benefit: {', '.join(names)}")
    return 0


def cmd_serve(args) -> int:
    import os

    import uvicorn

    from .service import create_app

    addr = args.addr or os.environ.get("CLOUDCOST_ADDR", "127.0.0.1:8080")
    host, _, port_text = addr.partition(":")
    try:
        port = int(port_text or "8080")
    except ValueError:
        raise CliError(f"bad --addr {addr!r}") from None
    catalog_dir = args.catalog_dir or os.environ.get("CLOUDCOST_CATALOG_DIR")
    report_dir = args.report_dir or os.environ.get("CLOUDCOST_REPORT_DIR")
    if not catalog_dir or not report_dir:
        raise CliError("serve requires --catalog-dir and --report-dir "
                       "(or CLOUDCOST_CATALOG_DIR / CLOUDCOST_REPORT_DIR)")
    app = create_app(catalog_dir=catalog_dir, report_dir=report_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=port, log_level="warning")
    return 0
