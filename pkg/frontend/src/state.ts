// Workspace state: model drafts, scenario knobs, and the last results per
// option. Results are tagged with the exact request that produced them, so
// any edit marks the charts stale until the next run.

import type { CompareRequest, ServiceApi, SimulateRequest } from "./api.js";
import { ServiceError } from "./api.js";
import type {
  ComparisonResult,
  ModelDoc,
  NodeDoc,
  PlanDoc,
  ScenarioDoc,
  SimulateResponse,
  UsageSpecDoc,
} from "./types.js";

export interface OptionDraft {
  label: string;
  model: ModelDoc;
}

export interface ScenarioDraft {
  enabled: boolean;
  multiplier: number; // e.g. 0.85
  fromMonth: string;  // YYYY-MM
}

export interface Workspace {
  options: OptionDraft[];
  plan: PlanDoc | null;
  planLabel: string;
  catalogRef: string;
  windowFrom: string;
  windowTo: string;
  discountRate: string;
  scenario: ScenarioDraft;
  reference: string;
}

export interface RunResults {
  requestKey: string;
  comparison: ComparisonResult | null;
  reports: Record<string, SimulateResponse>;
  errors: string[];
}

export type PatternEdit =
  | { ok: true }
  | { ok: false; diagnostic: string };

export function scenarioDoc(scenario: ScenarioDraft): ScenarioDoc | null {
  if (!scenario.enabled) return null;
  return {
    schema: 1,
    label: `x${scenario.multiplier} from ${scenario.fromMonth}`,
    adjustments: [{
      resources: ["instance-hour", "storage-gb-month"],
      multiplier: String(scenario.multiplier),
      from_month: scenario.fromMonth,
    }],
  };
}

/** Canonical fingerprint of everything that affects simulation results. */
export function requestKey(workspace: Workspace): string {
  return JSON.stringify({
    options: workspace.options,
    plan: workspace.plan,
    planLabel: workspace.planLabel,
    catalog: workspace.catalogRef,
    window: [workspace.windowFrom, workspace.windowTo],
    rate: workspace.discountRate,
    scenario: scenarioDoc(workspace.scenario),
    reference: workspace.reference,
  });
}

export class ExplorerStore {
  workspace: Workspace;
  results: RunResults | null = null;
  private inFlight: AbortController | null = null;

  constructor(private readonly api: ServiceApi, workspace: Workspace) {
    this.workspace = workspace;
  }

  /** Charts may only render when this is false. */
  get stale(): boolean {
    return this.results === null || this.results.requestKey !== requestKey(this.workspace);
  }

  setScenarioEnabled(enabled: boolean): void {
    this.workspace.scenario.enabled = enabled;
  }

  setScenarioMultiplier(multiplier: number): void {
    this.workspace.scenario.multiplier = multiplier;
  }

  setScenarioFromMonth(fromMonth: string): void {
    this.workspace.scenario.fromMonth = fromMonth;
  }

  setDiscountRate(rate: string): void {
    this.workspace.discountRate = rate;
  }

  option(label: string): OptionDraft {
    const found = this.workspace.options.find((o) => o.label === label);
    if (!found) throw new Error(`no option ${label}`);
    return found;
  }

  /**
   * Validate a pattern edit by round-tripping the amended draft through the
   * service; invalid text returns the parser diagnostic and leaves the draft
   * untouched.
   */
  async editPattern(optionLabel: string, nodeId: string, field: string,
                    patternText: string): Promise<PatternEdit> {
    const draft = this.option(optionLabel);
    const candidate: ModelDoc = JSON.parse(JSON.stringify(draft.model));
    const node = candidate.nodes.find((n: NodeDoc) => n.id === nodeId);
    if (!node) return { ok: false, diagnostic: `no node ${nodeId} in ${optionLabel}` };

    const current = node[field] as UsageSpecDoc | number | undefined;
    const baseline = typeof current === "number" ? current : current?.baseline ?? 0;
    if (patternText.trim() === "") {
      node[field] = baseline;
    } else {
      node[field] = { baseline, patterns: patternText };
    }
    try {
      await this.api.validate(candidate);
    } catch (error) {
      if (error instanceof ServiceError) {
        return { ok: false, diagnostic: error.message };
      }
      throw error;
    }
    draft.model = candidate;
    return { ok: true };
  }

  /** Re-simulate every option and the comparison; newer runs cancel older ones. */
  async runWhatIf(): Promise<RunResults> {
    const key = requestKey(this.workspace);
    this.inFlight?.abort();
    const controller = new AbortController();
    this.inFlight = controller;

    const scenario = scenarioDoc(this.workspace.scenario);
    const errors: string[] = [];
    const reports: Record<string, SimulateResponse> = {};

    const simulations = this.workspace.options.map(async (option) => {
      const body: SimulateRequest = {
        model: option.model,
        catalog_ref: this.workspace.catalogRef,
        window: { from: this.workspace.windowFrom, to: this.workspace.windowTo },
        scenario,
        discount_rate: this.workspace.discountRate,
      };
      try {
        reports[option.label] = await this.api.simulate(body, controller.signal);
      } catch (error) {
        if (error instanceof ServiceError) {
          errors.push(`${option.label}: ${error.message}`);
        } else {
          throw error;
        }
      }
    });

    const compareBody: CompareRequest = {
      options: this.workspace.options.map((o) => ({ label: o.label, model: o.model })),
      plan: this.workspace.plan
        ? { ...this.workspace.plan, label: this.workspace.planLabel }
        : null,
      catalog_ref: this.workspace.catalogRef,
      window: { from: this.workspace.windowFrom, to: this.workspace.windowTo },
      scenario,
      discount_rate: this.workspace.discountRate,
      reference: this.workspace.reference,
    };
    let comparison: ComparisonResult | null = null;
    const comparing = this.api.compare(compareBody, controller.signal)
      .then((result) => { comparison = result; })
      .catch((error) => {
        if (error instanceof ServiceError) errors.push(`compare: ${error.message}`);
        else throw error;
      });

    await Promise.all([...simulations, comparing]);
    if (controller.signal.aborted) {
      throw new DOMException("superseded", "AbortError");
    }
    const results: RunResults = { requestKey: key, comparison, reports, errors };
    this.results = results;
    return results;
  }

  /** Ascending NPV rows for the bar chart; null while results are stale. */
  npvRanking(): ComparisonResult["rows"] | null {
    if (this.stale || !this.results?.comparison) return null;
    return this.results.comparison.rows;
  }

  /** Per-option yearly flows, aligned on year indices. */
  yearlySeries(): { years: string[]; series: Array<{ label: string; values: number[] }> } | null {
    const rows = this.npvRanking();
    if (!rows) return null;
    const years = Object.keys(rows[0]?.cash_flows ?? {}).sort((a, b) => +a - +b);
    return {
      years: years.map((y) => `year ${y}`),
      series: rows.map((row) => ({
        label: row.label,
        values: years.map((y) => Number(row.cash_flows[y] ?? "0")),
      })),
    };
  }

  /** Monthly cost per group for one option's last report. */
  groupSeries(label: string): { months: string[]; series: Array<{ label: string; values: number[] }> } | null {
    if (this.stale) return null;
    const response = this.results?.reports[label];
    if (!response) return null;
    const report = response.report.report;
    const months = Object.keys(report.monthly_totals).sort();
    const groups = Object.keys(report.group_totals).sort();
    return {
      months,
      series: groups.map((group) => ({
        label: group,
        values: months.map((m) => Number(report.group_totals[group]?.[m] ?? "0")),
      })),
    };
  }
}

const STORAGE_KEY = "cloudcost-explorer-workspace";

export function saveWorkspace(storage: Pick<Storage, "setItem">, workspace: Workspace): void {
  storage.setItem(STORAGE_KEY, JSON.stringify(workspace));
}

export function loadWorkspace(storage: Pick<Storage, "getItem">): Workspace | null {
  const raw = storage.getItem(STORAGE_KEY);
  if (!raw) return null;
  try {
    return JSON.parse(raw) as Workspace;
  } catch {
    return null;
  }
}
