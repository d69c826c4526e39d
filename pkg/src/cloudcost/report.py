"""Report emission: CSV table, canonical JSON, and a self-contained HTML page.

All three views derive from one CostReport plus zero or more NPV results.
Emission is deterministic: identical inputs give byte-identical output, and
the report id is the SHA-256 of the canonical JSON bytes.
"""

from __future__ import annotations

import csv
import hashlib
import html
import io
import json
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_EVEN
from typing import Optional, Sequence

from .engine import CostLine, CostReport, UNGROUPED
from .finance import Comparison, FinancialOption, NpvResult
from .model import DeploymentModel
from .patterns import MonthWindow, YearMonth

__all__ = [
    "ReportBundle",
    "emit_csv",
    "emit_json",
    "emit_html",
    "report_id",
    "report_from_json",
    "make_bundle",
]

CSV_HEADER = ["month", "element_id", "resource", "quantity", "unit",
              "unit_price", "cost", "group"]

_CENT = Decimal("0.01")


@dataclass(frozen=True)
class ReportBundle:
    csv: bytes
    json: bytes
    html: bytes
    report_id: str


def _cents(amount: Decimal) -> Decimal:
    return amount.quantize(_CENT, rounding=ROUND_HALF_EVEN)


def emit_csv(report: CostReport) -> bytes:
    """One row per cost line in engine order; RFC-4180, LF endings, UTF-8."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for line in report.lines:
        writer.writerow([
            str(line.month),
            line.element_id,
            line.resource,
            repr(line.quantity),
            line.unit,
            str(line.unit_price),
            str(_cents(line.cost)),
            line.group_id or "",
        ])
    return out.getvalue().encode("utf-8")


def emit_json(report: CostReport, npv_results: Sequence[NpvResult] = ()) -> bytes:
    """Canonical JSON: sorted keys, no whitespace, decimals as strings."""
    obj = _report_obj(report, npv_results)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")


def report_id(json_bytes: bytes) -> str:
    return hashlib.sha256(json_bytes).hexdigest()


def make_bundle(report: CostReport, npv_results: Sequence[NpvResult] = (),
                comparison: Optional[Comparison] = None,
                options: Sequence[FinancialOption] = (),
                model: Optional[DeploymentModel] = None) -> ReportBundle:
    json_bytes = emit_json(report, npv_results)
    return ReportBundle(
        csv=emit_csv(report),
        json=json_bytes,
        html=emit_html(report, npv_results, comparison, options=options, model=model),
        report_id=report_id(json_bytes),
    )


def _report_obj(report: CostReport, npv_results: Sequence[NpvResult]) -> dict:
    lines = [{
        "month": str(l.month),
        "element_id": l.element_id,
        "resource": l.resource,
        "quantity": l.quantity,
        "unit": l.unit,
        "unit_price": str(l.unit_price),
        "cost": str(l.cost),
        "group": l.group_id,
    } for l in report.lines]
    group_totals: dict[str, dict[str, str]] = {}
    for (group, month), amount in report.group_totals.items():
        group_totals.setdefault(group, {})[str(month)] = str(amount)
    return {
        "schema": 1,
        "report": {
            "model_name": report.model_name,
            "catalog_label": report.catalog_label,
            "scenario_label": report.scenario_label,
            "currency": report.currency,
            "window": {"from": str(report.window.start), "to": str(report.window.end)},
            "lines": lines,
            "monthly_totals": {str(m): str(v) for m, v in report.monthly_totals.items()},
            "group_totals": group_totals,
        },
        "npv": [{
            "label": r.label,
            "rate": str(r.rate),
            "npv": str(r.npv),
            "per_year_discounted": {str(y): str(v) for y, v in r.per_year_discounted.items()},
        } for r in npv_results],
    }


def report_from_json(data: bytes) -> tuple[CostReport, list[NpvResult]]:
    """Inverse of emit_json; lossless for every report field."""
    obj = json.loads(data.decode("utf-8"))
    r = obj["report"]
    window = MonthWindow(YearMonth.parse(r["window"]["from"]),
                         YearMonth.parse(r["window"]["to"]))
    lines = tuple(CostLine(
        month=YearMonth.parse(l["month"]),
        element_id=l["element_id"],
        resource=l["resource"],
        quantity=float(l["quantity"]),
        unit=l["unit"],
        unit_price=Decimal(l["unit_price"]),
        cost=Decimal(l["cost"]),
        group_id=l["group"],
    ) for l in r["lines"])
    monthly = {YearMonth.parse(m): Decimal(v) for m, v in r["monthly_totals"].items()}
    groups = {}
    for group, by_month in r["group_totals"].items():
        for m, v in by_month.items():
            groups[(group, YearMonth.parse(m))] = Decimal(v)
    report = CostReport(
        lines=lines, monthly_totals=monthly, group_totals=groups, window=window,
        model_name=r["model_name"], catalog_label=r["catalog_label"],
        scenario_label=r["scenario_label"], currency=r["currency"],
    )
    npvs = [NpvResult(
        label=n["label"], rate=Decimal(n["rate"]), npv=Decimal(n["npv"]),
        per_year_discounted={int(y): Decimal(v) for y, v in n["per_year_discounted"].items()},
    ) for n in obj.get("npv", [])]
    return report, npvs


# --- HTML -----------------------------------------------------------------

_STYLE = """
body { font-family: system-ui, sans-serif; margin: 2rem auto; max-width: 70rem;
       color: #1d2530; }
h1 { font-size: 1.4rem; } h2 { font-size: 1.1rem; margin-top: 2rem; }
table { border-collapse: collapse; font-size: 0.8rem; width: 100%; }
th, td { border: 1px solid #ccd3dc; padding: 2px 8px; text-align: right; }
th { background: #eef2f7; } td:nth-child(-n+3), th:nth-child(-n+3) { text-align: left; }
.meta { color: #5a6572; font-size: 0.9rem; }
.placeholder { padding: 2rem; background: #f4f6f9; text-align: center; color: #5a6572; }
svg text { font-family: system-ui, sans-serif; }
"""


def emit_html(report: CostReport, npv_results: Sequence[NpvResult] = (),
              comparison: Optional[Comparison] = None, *,
              options: Sequence[FinancialOption] = (),
              model: Optional[DeploymentModel] = None) -> bytes:
    """Single-file page: charts, tables and an embedded JSON data island."""
    parts = ["<!DOCTYPE html>", '<html lang="en"><head><meta charset="utf-8">',
             f"<title>Cost report: {html.escape(report.model_name)}</title>",
             f"<style>{_STYLE}</style></head><body>"]
    scenario = f" / scenario {html.escape(report.scenario_label)}" if report.scenario_label else ""
    parts.append(f"<h1>Cost report: {html.escape(report.model_name)}</h1>")
    parts.append(
        f'<p class="meta">catalog {html.escape(report.catalog_label)}{scenario} &middot; '
        f"window {report.window.start} to {report.window.end} &middot; "
        f"currency {html.escape(report.currency)} &middot; "
        f"total {_cents(report.total())}</p>")

    if not report.lines:
        parts.append('<div class="placeholder">no cost lines</div>')
    else:
        months = [str(m) for m in report.window]
        totals = [float(report.monthly_totals[m]) for m in report.window]
        parts.append("<h2>Monthly cost</h2>")
        parts.append(_bar_chart(months, [("total", totals)], report.currency))

        breakdown = _group_series(report)
        parts.append("<h2>Cost by group</h2>")
        parts.append(_bar_chart(months, breakdown, report.currency, stacked=True))

    yearly = options or ()
    if yearly:
        parts.append("<h2>Yearly cost by option</h2>")
        horizon = max(o.horizon_years for o in yearly)
        year_labels = [f"year {y}" for y in range(horizon)]
        series = [(o.label, [float(o.cash_flows.get(y, 0)) for y in range(horizon)])
                  for o in yearly]
        parts.append(_bar_chart(year_labels, series, report.currency))

    if npv_results:
        parts.append("<h2>Net present value</h2>")
        pct_by_label = {}
        if comparison is not None:
            pct_by_label = {row.label: row.pct_vs_reference for row in comparison.rows}
        labels, bars, annotations = [], [], []
        for r in npv_results:
            labels.append(r.label)
            bars.append(float(r.npv))
            pct = pct_by_label.get(r.label)
            annotations.append("" if pct is None else f"{float(pct) * 100:+.1f}%")
        parts.append(_bar_chart(labels, [("npv", bars)], report.currency,
                                annotations=annotations))
        parts.append(_npv_table(npv_results, comparison))

    if model is not None:
        parts.append("<h2>Model</h2>")
        parts.append(_model_diagram(model))

    if report.lines:
        parts.append("<h2>Cost lines</h2>")
        parts.append(_lines_table(report.lines))

    island = emit_json(report, npv_results).decode("utf-8").replace("</", "<\\/")
    parts.append(f'<script type="application/json" id="report-data">{island}</script>')
    parts.append("</body></html>\n")
    return "\n".join(parts).encode("utf-8")


def _group_series(report: CostReport) -> list[tuple[str, list[float]]]:
    months = list(report.window)
    groups = sorted({g for (g, _m) in report.group_totals})
    if UNGROUPED in groups:  # keep the implicit bucket last
        groups.remove(UNGROUPED)
        groups.append(UNGROUPED)
    return [
        (g, [float(report.group_totals.get((g, m), Decimal(0))) for m in months])
        for g in groups
    ]


_PALETTE = ("#3d6fb4", "#b4573d", "#4d9a64", "#8a63b0", "#b49a3d",
            "#3da3b4", "#b43d85", "#6b7485", "#7aa23c", "#a23c3c")


def _bar_chart(x_labels: Sequence[str], series: Sequence[tuple[str, Sequence[float]]],
               currency: str, stacked: bool = False,
               annotations: Optional[Sequence[str]] = None) -> str:
    width, height, pad_left, pad_bottom, pad_top = 960, 280, 64, 46, 14
    n = len(x_labels)
    if n == 0 or not series:
        return '<div class="placeholder">no data</div>'
    if stacked:
        peak = max(sum(values[i] for _, values in series) for i in range(n))
    else:
        peak = max(max(values) for _, values in series)
    peak = peak or 1.0
    plot_w, plot_h = width - pad_left - 8, height - pad_bottom - pad_top
    slot = plot_w / n
    bar_w = slot * 0.8 / (1 if stacked else len(series))

    svg = [f'<svg viewBox="0 0 {width} {height}" role="img">']
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = pad_top + plot_h * (1 - frac)
        svg.append(f'<line x1="{pad_left}" y1="{y:.1f}" x2="{width - 8}" y2="{y:.1f}" '
                   'stroke="#e3e8ee"/>')
        svg.append(f'<text x="{pad_left - 6}" y="{y + 4:.1f}" text-anchor="end" '
                   f'font-size="10">{peak * frac:,.0f}</text>')
    for i in range(n):
        x0 = pad_left + i * slot + slot * 0.1
        if stacked:
            y_top = pad_top + plot_h
            for s, (name, values) in enumerate(series):
                h = plot_h * values[i] / peak
                y_top -= h
                svg.append(f'<rect x="{x0:.1f}" y="{y_top:.1f}" width="{bar_w:.1f}" '
                           f'height="{h:.1f}" fill="{_PALETTE[s % len(_PALETTE)]}">'
                           f"<title>{html.escape(name)} {x_labels[i]}: {values[i]:,.2f}</title></rect>")
        else:
            for s, (name, values) in enumerate(series):
                h = plot_h * values[i] / peak
                x = x0 + s * bar_w
                y = pad_top + plot_h - h
                svg.append(f'<rect x="{x:.1f}" y="{y:.1f}" width="{bar_w:.1f}" '
                           f'height="{h:.1f}" fill="{_PALETTE[s % len(_PALETTE)]}">'
                           f"<title>{html.escape(name)} {x_labels[i]}: {values[i]:,.2f}</title></rect>")
        if annotations and annotations[i]:
            top = pad_top + plot_h - plot_h * series[0][1][i] / peak
            svg.append(f'<text x="{x0 + slot * 0.4:.1f}" y="{top - 4:.1f}" '
                       f'text-anchor="middle" font-size="11">{html.escape(annotations[i])}</text>')
    step = max(1, n // 12)
    for i in range(0, n, step):
        x = pad_left + i * slot + slot / 2
        svg.append(f'<text x="{x:.1f}" y="{height - pad_bottom + 14}" text-anchor="middle" '
                   f'font-size="9">{html.escape(x_labels[i])}</text>')
    if len(series) > 1:
        for s, (name, _values) in enumerate(series):
            x = pad_left + s * 130
            y = height - 12
            svg.append(f'<rect x="{x}" y="{y - 9}" width="10" height="10" '
                       f'fill="{_PALETTE[s % len(_PALETTE)]}"/>')
            svg.append(f'<text x="{x + 14}" y="{y}" font-size="10">{html.escape(name)}</text>')
    svg.append(f'<text x="8" y="{pad_top}" font-size="9" fill="#5a6572">{currency}</text>')
    svg.append("</svg>")
    return "".join(svg)


def _npv_table(npv_results: Sequence[NpvResult],
               comparison: Optional[Comparison]) -> str:
    rows = ["<table><tr><th>option</th><th>rate</th><th>npv</th><th>vs reference</th>"
            "<th>year-0 outlay</th></tr>"]
    pct, year0 = {}, {}
    if comparison is not None:
        pct = {r.label: r.pct_vs_reference for r in comparison.rows}
        year0 = {r.label: r.year0 for r in comparison.rows}
    for r in npv_results:
        vs = pct.get(r.label)
        vs_text = "" if vs is None else f"{float(vs) * 100:+.1f}%"
        y0 = year0.get(r.label)
        y0_text = "" if y0 is None else str(_cents(y0))
        rows.append(f"<tr><td>{html.escape(r.label)}</td><td>{r.rate}</td>"
                    f"<td>{_cents(r.npv)}</td><td>{vs_text}</td><td>{y0_text}</td></tr>")
    rows.append("</table>")
    return "".join(rows)


def _lines_table(lines: Sequence[CostLine]) -> str:
    rows = ["<table><tr>" + "".join(f"<th>{h}</th>" for h in CSV_HEADER) + "</tr>"]
    for l in lines:
        rows.append(
            f"<tr><td>{l.month}</td><td>{html.escape(l.element_id)}</td>"
            f"<td>{l.resource}</td><td>{l.quantity:g}</td><td>{l.unit}</td>"
            f"<td>{l.unit_price}</td><td>{_cents(l.cost)}</td>"
            f"<td>{html.escape(l.group_id or '')}</td></tr>")
    rows.append("</table>")
    return "".join(rows)


def _model_diagram(model: DeploymentModel) -> str:
    """Static boxes-and-edges picture of the deployment graph."""
    per_row = 4
    box_w, box_h, gap_x, gap_y = 200, 46, 36, 40
    positions = {}
    for i, node in enumerate(model.nodes):
        col, row = i % per_row, i // per_row
        positions[node.id] = (16 + col * (box_w + gap_x), 16 + row * (box_h + gap_y))
    rows = (len(model.nodes) + per_row - 1) // per_row
    width = 16 + per_row * (box_w + gap_x)
    height = 32 + max(rows, 1) * (box_h + gap_y)
    svg = [f'<svg viewBox="0 0 {width} {height}" role="img">']
    for path in model.paths:
        if path.from_node in positions and path.to_node in positions:
            x1, y1 = positions[path.from_node]
            x2, y2 = positions[path.to_node]
            svg.append(f'<line x1="{x1 + box_w / 2}" y1="{y1 + box_h / 2}" '
                       f'x2="{x2 + box_w / 2}" y2="{y2 + box_h / 2}" '
                       'stroke="#8a94a3" stroke-width="1.5"/>')
    for node in model.nodes:
        x, y = positions[node.id]
        dash = ' stroke-dasharray="4 3"' if not node.billable else ""
        svg.append(f'<rect x="{x}" y="{y}" width="{box_w}" height="{box_h}" rx="6" '
                   f'fill="#f4f6f9" stroke="#3d6fb4"{dash}/>')
        svg.append(f'<text x="{x + box_w / 2}" y="{y + 19}" text-anchor="middle" '
                   f'font-size="12">{html.escape(node.id)}</text>')
        svg.append(f'<text x="{x + box_w / 2}" y="{y + 35}" text-anchor="middle" '
                   f'font-size="9" fill="#5a6572">{node.kind.value}</text>')
    svg.append("</svg>")
    return "".join(svg)
