// Service client. The explorer performs no cost arithmetic of its own:
// every number it displays comes from these endpoints.

import type {
  ComparisonResult,
  ModelDoc,
  PlanDoc,
  ScenarioDoc,
  SimulateResponse,
  Violation,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details?: unknown,
  ) {
    super(message);
  }
}

export interface SimulateRequest {
  model: ModelDoc;
  catalog_ref: string;
  window: { from: string; to: string };
  scenario?: ScenarioDoc | null;
  discount_rate?: string;
}

export interface CompareRequest {
  options: Array<{ label: string; model: ModelDoc }>;
  plan?: PlanDoc | null;
  catalog_ref: string;
  window: { from: string; to: string };
  scenario?: ScenarioDoc | null;
  discount_rate?: string;
  reference?: string;
}

export interface ServiceApi {
  validate(model: unknown, signal?: AbortSignal): Promise<Violation[]>;
  simulate(body: SimulateRequest, signal?: AbortSignal): Promise<SimulateResponse>;
  compare(body: CompareRequest, signal?: AbortSignal): Promise<ComparisonResult>;
}

async function postJson<T>(url: string, body: unknown, signal?: AbortSignal): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  } catch (error) {
    if (error instanceof DOMException && error.name === "AbortError") throw error;
    const message = error instanceof Error ? error.message : String(error);
    throw new ServiceError(0, "network", `service unreachable: ${message}`);
  }
  const payload = await response.json().catch(() => null);
  if (!response.ok) {
    const code = payload?.code ?? "error";
    const message = payload?.message ?? `request failed (${response.status})`;
    throw new ServiceError(response.status, code, message, payload?.details);
  }
  return payload as T;
}

export class HttpApi implements ServiceApi {
  constructor(readonly baseUrl: string = "") {}

  validate(model: unknown, signal?: AbortSignal): Promise<Violation[]> {
    return postJson<{ violations: Violation[] }>(
      `${this.baseUrl}/v1/validate`, model, signal,
    ).then((body) => body.violations);
  }

  simulate(body: SimulateRequest, signal?: AbortSignal): Promise<SimulateResponse> {
    return postJson<SimulateResponse>(`${this.baseUrl}/v1/simulate`, body, signal);
  }

  compare(body: CompareRequest, signal?: AbortSignal): Promise<ComparisonResult> {
    return postJson<ComparisonResult>(`${this.baseUrl}/v1/compare`, body, signal);
  }
}
