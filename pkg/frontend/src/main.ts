// What-if scenario explorer: edit usage patterns, price scenarios, and the
// discount rate; re-simulate through the service; compare options visually.

import { HttpApi } from "./api.js";
import { barChart, lineChart, npvChart } from "./charts.js";
import {
  ExplorerStore,
  Workspace,
  loadWorkspace,
  saveWorkspace,
} from "./state.js";
import type { NodeDoc } from "./types.js";

const api = new HttpApi("");

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

async function defaultWorkspace(): Promise<Workspace> {
  const response = await fetch("school-workspace.json");
  if (!response.ok) throw new Error("cannot load the bundled example workspace");
  return (await response.json()) as Workspace;
}

function patternFieldsFor(node: NodeDoc): string[] {
  switch (node.kind) {
    case "virtual-machine":
      return ["instance_count", "io_in_requests_per_month", "io_out_requests_per_month"];
    case "virtual-storage":
    case "database":
      return ["size_gb", "io_in_requests_per_month", "io_out_requests_per_month"];
    default:
      return [];
  }
}

function currentPatternText(node: NodeDoc, field: string): string {
  const value = node[field];
  if (value && typeof value === "object" && "patterns" in value) {
    return String((value as { patterns?: string }).patterns ?? "");
  }
  return "";
}

async function start(): Promise<void> {
  const stored = loadWorkspace(window.localStorage);
  const workspace = stored ?? (await defaultWorkspace());
  const store = new ExplorerStore(api, workspace);

  const optionSelect = el<HTMLSelectElement>("option-select");
  const nodeSelect = el<HTMLSelectElement>("node-select");
  const fieldSelect = el<HTMLSelectElement>("field-select");
  const patternInput = el<HTMLInputElement>("pattern-input");
  const patternFeedback = el<HTMLSpanElement>("pattern-feedback");
  const scenarioToggle = el<HTMLInputElement>("scenario-toggle");
  const multiplierSlider = el<HTMLInputElement>("multiplier-slider");
  const multiplierLabel = el<HTMLSpanElement>("multiplier-label");
  const fromMonthInput = el<HTMLInputElement>("from-month");
  const rateInput = el<HTMLInputElement>("rate-input");
  const runButton = el<HTMLButtonElement>("run-button");
  const status = el<HTMLDivElement>("status");
  const staleBanner = el<HTMLDivElement>("stale-banner");

  function syncControls(): void {
    scenarioToggle.checked = store.workspace.scenario.enabled;
    multiplierSlider.value = String(store.workspace.scenario.multiplier);
    multiplierLabel.textContent = `x${store.workspace.scenario.multiplier.toFixed(2)}`;
    fromMonthInput.value = store.workspace.scenario.fromMonth;
    rateInput.value = store.workspace.discountRate;
  }

  function syncOptionEditors(): void {
    const option = store.option(optionSelect.value);
    const nodes = option.model.nodes.filter((n) => patternFieldsFor(n).length > 0);
    nodeSelect.innerHTML = nodes.map((n) => `<option>${n.id}</option>`).join("");
    syncFieldEditor();
  }

  function syncFieldEditor(): void {
    const option = store.option(optionSelect.value);
    const node = option.model.nodes.find((n) => n.id === nodeSelect.value);
    if (!node) return;
    const fields = patternFieldsFor(node);
    fieldSelect.innerHTML = fields.map((f) => `<option>${f}</option>`).join("");
    patternInput.value = currentPatternText(node, fieldSelect.value || fields[0]);
    patternFeedback.textContent = "";
    patternFeedback.className = "";
  }

  function renderCharts(): void {
    staleBanner.hidden = !store.stale;
    const ranking = store.npvRanking();
    const comparison = store.results?.comparison;
    el("npv-chart").innerHTML = ranking && comparison
      ? npvChart(ranking, comparison.reference)
      : '<div class="placeholder">run a simulation to see results</div>';

    const yearly = store.yearlySeries();
    el("yearly-chart").innerHTML = yearly
      ? barChart(yearly.years, yearly.series)
      : '<div class="placeholder">run a simulation to see results</div>';

    const groups = store.groupSeries(optionSelect.value);
    el("group-chart").innerHTML = groups
      ? lineChart(groups.months, groups.series)
      : '<div class="placeholder">no report for this option yet</div>';

    const errors = store.results?.errors ?? [];
    status.textContent = errors.length ? errors.join("; ") : "";
    status.className = errors.length ? "error" : "";
  }

  optionSelect.innerHTML = store.workspace.options
    .map((o) => `<option>${o.label}</option>`).join("");
  syncControls();
  syncOptionEditors();
  renderCharts();

  optionSelect.addEventListener("change", () => { syncOptionEditors(); renderCharts(); });
  nodeSelect.addEventListener("change", syncFieldEditor);
  fieldSelect.addEventListener("change", syncFieldEditor);

  patternInput.addEventListener("change", async () => {
    const edit = await store.editPattern(
      optionSelect.value, nodeSelect.value, fieldSelect.value, patternInput.value);
    if (edit.ok) {
      patternFeedback.textContent = "accepted";
      patternFeedback.className = "ok";
      saveWorkspace(window.localStorage, store.workspace);
    } else {
      patternFeedback.textContent = edit.diagnostic;
      patternFeedback.className = "error";
    }
    renderCharts();
  });

  scenarioToggle.addEventListener("change", () => {
    store.setScenarioEnabled(scenarioToggle.checked);
    saveWorkspace(window.localStorage, store.workspace);
    renderCharts();
  });
  multiplierSlider.addEventListener("input", () => {
    store.setScenarioMultiplier(Number(multiplierSlider.value));
    multiplierLabel.textContent = `x${Number(multiplierSlider.value).toFixed(2)}`;
    saveWorkspace(window.localStorage, store.workspace);
    renderCharts();
  });
  fromMonthInput.addEventListener("change", () => {
    store.setScenarioFromMonth(fromMonthInput.value);
    saveWorkspace(window.localStorage, store.workspace);
    renderCharts();
  });
  rateInput.addEventListener("change", () => {
    store.setDiscountRate(rateInput.value);
    saveWorkspace(window.localStorage, store.workspace);
    renderCharts();
  });

  runButton.addEventListener("click", async () => {
    runButton.disabled = true;
    status.textContent = "simulating...";
    status.className = "";
    try {
      await store.runWhatIf();
    } catch (error) {
      if (!(error instanceof DOMException && error.name === "AbortError")) {
        status.textContent = error instanceof Error ? error.message : String(error);
        status.className = "error";
      }
    } finally {
      runButton.disabled = false;
    }
    renderCharts();
  });

  el<HTMLButtonElement>("reset-button").addEventListener("click", async () => {
    const fresh = await defaultWorkspace();
    store.workspace = fresh;
    store.results = null;
    saveWorkspace(window.localStorage, store.workspace);
    optionSelect.innerHTML = store.workspace.options
      .map((o) => `<option>${o.label}</option>`).join("");
    syncControls();
    syncOptionEditors();
    renderCharts();
  });
}

start().catch((error) => {
  const status = document.getElementById("status");
  if (status) {
    status.textContent = error instanceof Error ? error.message : String(error);
    status.className = "error";
  }
});
