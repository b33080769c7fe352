/** Assemble the engine's scenario document from view state and the
 * catalog/dataset documents fetched from the listings.  Pure data shuffling;
 * the engine validates and computes. */

import type { ScenarioViewState } from './state';
import type { DatasetDocument, ScenarioDocument } from './types';

export function buildScenario(
  state: ScenarioViewState,
  catalog: Record<string, number>,
  dataset: DatasetDocument,
): ScenarioDocument {
  return {
    name: `${state.catalog}/${state.variant} on ${state.dataset}`,
    catalog,
    dataset,
    pipelines: state.pipelines.map((kind) =>
      kind === 'RAG' || kind === 'FT_RAG'
        ? { kind, k: state.k, len_p: state.lenP, len_p_rag: state.lenPRag }
        : { kind, len_p: state.lenP },
    ),
    workload: { num_rl: state.numRequests, lifetime_hours: state.lifetimeHours },
    economics: { v: state.v, h: state.h, r: state.r, s: state.s },
  };
}

/** Request-volume grid for the amortization chart: powers of ten spanning
 * the selected volume. */
export function requestGrid(numRequests: number): number[] {
  const anchor = Math.max(1, Math.round(numRequests));
  const top = Math.max(6, Math.ceil(Math.log10(anchor)) + 1);
  const grid = new Set<number>();
  for (let exp = 2; exp <= top; exp += 1) grid.add(10 ** exp);
  grid.add(anchor);
  return [...grid].sort((a, b) => a - b);
}
