/** Typed client for /api/v1. Pure transport: no math, no caching. */

import type {
  ApiError,
  CatalogEntry,
  CostResponse,
  DatasetEntry,
  EvaluateResponse,
  ScenarioDocument,
} from './types';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiRequestError extends Error {
  status: number;
  fields: { message: string; field?: string }[];

  constructor(status: number, fields: { message: string; field?: string }[]) {
    super(fields.map((f) => (f.field ? `${f.field}: ${f.message}` : f.message)).join('; '));
    this.status = status;
    this.fields = fields;
  }
}

export class ApiClient {
  private fetchFn: FetchLike;
  private base: string;

  constructor(fetchFn: FetchLike = (input, init) => fetch(input, init), base = '') {
    this.fetchFn = fetchFn;
    this.base = base;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      let payload: ApiError | null = null;
      try {
        payload = (await response.json()) as ApiError;
      } catch {
        payload = null;
      }
      throw new ApiRequestError(response.status, payload?.errors ?? [{ message: response.statusText }]);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  evaluate(scenario: ScenarioDocument): Promise<EvaluateResponse> {
    return this.post('/api/v1/evaluate', scenario);
  }

  cost(scenario: ScenarioDocument, requests: number[]): Promise<CostResponse> {
    return this.post('/api/v1/cost', { scenario, requests });
  }

  catalogs(): Promise<{ catalogs: CatalogEntry[] }> {
    return this.request('/api/v1/catalogs');
  }

  datasets(): Promise<{ datasets: DatasetEntry[] }> {
    return this.request('/api/v1/datasets');
  }

  version(): Promise<{ tool: string; version: string; schema: string }> {
    return this.request('/api/v1/version');
  }
}
