/** Explorer view state: what-if knobs, selections, and the latest responses.
 *
 * Responses are correlated by a monotonically increasing sequence number;
 * a response is applied only when it answers the most recent request, so
 * out-of-order arrivals are dropped and the displayed state always matches
 * the final control position.  The engine's scenario hash is kept alongside
 * for staleness checks and permalinks of evaluated state.
 */

import type { CostResponse, EvaluateResponse, PipelineKind } from './types';

export interface ScenarioViewState {
  s: number;
  r: number;
  v: number;
  h: number;
  catalog: string;
  variant: string;
  dataset: string;
  pipelines: PipelineKind[];
  numRequests: number;
  lifetimeHours: number;
  k: number;
  lenP: number;
  lenPRag: number;
}

export const DEFAULT_STATE: ScenarioViewState = {
  s: 0.62,
  r: 0.5,
  v: 0.1,
  h: 1.0,
  catalog: 'gpt-4o',
  variant: 'default',
  dataset: 'manuals-gpt-4o',
  pipelines: ['Base', 'FT', 'RAG', 'FT_RAG'],
  numRequests: 100000,
  lifetimeHours: 168,
  k: 10,
  lenP: 300,
  lenPRag: 350,
};

const clamp01 = (x: number): number => Math.min(1, Math.max(0, x));

export function sanitize(state: ScenarioViewState): ScenarioViewState {
  return {
    ...state,
    s: clamp01(state.s),
    r: clamp01(state.r),
    v: Math.max(0, state.v),
    h: Math.max(0, state.h),
    numRequests: Math.max(1, Math.round(state.numRequests)),
    lifetimeHours: Math.max(1e-6, state.lifetimeHours),
    k: Math.max(1, Math.round(state.k)),
  };
}

// -- permalinks -------------------------------------------------------------

export function encodePermalink(state: ScenarioViewState): string {
  const params = new URLSearchParams({
    s: String(state.s),
    r: String(state.r),
    v: String(state.v),
    h: String(state.h),
    catalog: state.catalog,
    variant: state.variant,
    dataset: state.dataset,
    pipelines: state.pipelines.join(','),
    n: String(state.numRequests),
    lifetime: String(state.lifetimeHours),
    k: String(state.k),
  });
  return '#' + params.toString();
}

export function decodePermalink(fragment: string, fallback: ScenarioViewState): ScenarioViewState {
  const raw = fragment.startsWith('#') ? fragment.slice(1) : fragment;
  if (!raw) return { ...fallback };
  const params = new URLSearchParams(raw);
  const num = (key: string, current: number): number => {
    const value = params.get(key);
    const parsed = value === null ? NaN : Number(value);
    return Number.isFinite(parsed) ? parsed : current;
  };
  const pipelines = (params.get('pipelines') ?? fallback.pipelines.join(','))
    .split(',')
    .filter((kind): kind is PipelineKind => ['Base', 'FT', 'RAG', 'FT_RAG'].includes(kind));
  return sanitize({
    ...fallback,
    s: num('s', fallback.s),
    r: num('r', fallback.r),
    v: num('v', fallback.v),
    h: num('h', fallback.h),
    catalog: params.get('catalog') ?? fallback.catalog,
    variant: params.get('variant') ?? fallback.variant,
    dataset: params.get('dataset') ?? fallback.dataset,
    pipelines: pipelines.length ? pipelines : [...fallback.pipelines],
    numRequests: num('n', fallback.numRequests),
    lifetimeHours: num('lifetime', fallback.lifetimeHours),
    k: num('k', fallback.k),
  });
}

// -- the store ----------------------------------------------------------------

export interface EvaluatedResults {
  evaluation: EvaluateResponse | null;
  costSeries: CostResponse | null;
}

type Listener = () => void;

export class Store {
  state: ScenarioViewState;
  results: EvaluatedResults = { evaluation: null, costSeries: null };
  lastError: string | null = null;

  private seq = 0;
  private appliedSeq = 0;
  private listeners: Listener[] = [];

  constructor(initial: ScenarioViewState = DEFAULT_STATE) {
    this.state = sanitize({ ...initial });
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  update(patch: Partial<ScenarioViewState>): void {
    this.state = sanitize({ ...this.state, ...patch });
    this.emit();
  }

  /** Reserve a sequence number for a request about to be issued. */
  nextSeq(): number {
    this.seq += 1;
    return this.seq;
  }

  get latestSeq(): number {
    return this.seq;
  }

  /** Apply a response only if it answers the newest request; returns
   * whether it was applied.  The scenario hash of an applied evaluation is
   * the one all displayed values correspond to. */
  applyResults(seq: number, results: EvaluatedResults): boolean {
    if (seq < this.seq || seq <= this.appliedSeq) return false;
    this.appliedSeq = seq;
    this.results = results;
    this.lastError = null;
    this.emit();
    return true;
  }

  applyError(seq: number, message: string): boolean {
    if (seq < this.seq || seq <= this.appliedSeq) return false;
    this.appliedSeq = seq;
    this.lastError = message;
    this.emit();
    return true;
  }

  get scenarioHash(): string | null {
    return this.results.evaluation?.scenario_hash ?? null;
  }
}
