// Wire types for the cost service (/v1 endpoints).

export interface Violation {
  element: string;
  rule: string;
  message: string;
}

export interface UsageSpecDoc {
  baseline?: number;
  patterns?: string;
}

export interface NodeDoc {
  id: string;
  kind: string;
  [field: string]: unknown;
}

export interface ModelDoc {
  schema: number;
  name: string;
  nodes: NodeDoc[];
  [field: string]: unknown;
}

export interface PlanDoc {
  label?: string;
  server_classes: Array<{
    label: string;
    unit_capital: string | number;
    count: number;
    electricity_per_year: string | number;
  }>;
  upgrade_cycle_years: number;
}

export interface ScenarioDoc {
  schema: number;
  label: string;
  adjustments: Array<{
    resources: string[];
    multiplier: string;
    from_month: string;
  }>;
}

export interface ReportDoc {
  report: {
    model_name: string;
    monthly_totals: Record<string, string>;
    group_totals: Record<string, Record<string, string>>;
    window: { from: string; to: string };
    currency: string;
    [field: string]: unknown;
  };
  npv: Array<{ label: string; rate: string; npv: string }>;
}

export interface SimulateResponse {
  report_id: string;
  report: ReportDoc;
}

export interface ComparisonRow {
  label: string;
  npv: string;
  pct_vs_reference: string;
  year0: string;
  cash_flows: Record<string, string>;
}

export interface ComparisonResult {
  reference: string;
  rate: string;
  rows: ComparisonRow[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details?: unknown;
}
