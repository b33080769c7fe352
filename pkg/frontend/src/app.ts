/** Controller: wires controls to debounced engine calls and the charts.
 *
 * Evaluation discipline: slider motion is debounced per control, at most
 * one evaluate request is in flight at a time, and the newest state wins;
 * late or out-of-order responses are dropped by the store's sequence
 * check, so the display always corresponds to the final control position.
 */

import { ApiClient, ApiRequestError } from './api';
import { renderAmortization, renderBreakdownTable, renderCopBars } from './charts';
import { buildScenario, requestGrid } from './scenario';
import { DEFAULT_STATE, Store, decodePermalink, encodePermalink } from './state';
import type { ScenarioViewState } from './state';
import type { CatalogEntry, DatasetEntry, PipelineKind } from './types';
import { PIPELINE_KINDS } from './types';

const DEBOUNCE_MS = 150;

export interface AppOptions {
  debounceMs?: number;
  permalink?: boolean;
}

export class App {
  readonly store: Store;
  private client: ApiClient;
  private root: HTMLElement;
  private catalogs: CatalogEntry[] = [];
  private datasets: DatasetEntry[] = [];
  private debounceMs: number;
  private usePermalink: boolean;
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;
  private inFlight = false;
  private queued = false;

  constructor(root: HTMLElement, client: ApiClient, options: AppOptions = {}) {
    this.root = root;
    this.client = client;
    this.debounceMs = options.debounceMs ?? DEBOUNCE_MS;
    this.usePermalink = options.permalink ?? true;
    const initial = this.usePermalink
      ? decodePermalink(window.location.hash, DEFAULT_STATE)
      : { ...DEFAULT_STATE };
    this.store = new Store(initial);
  }

  async start(): Promise<void> {
    const [catalogPayload, datasetPayload] = await Promise.all([
      this.client.catalogs(),
      this.client.datasets(),
    ]);
    this.catalogs = catalogPayload.catalogs;
    this.datasets = datasetPayload.datasets;
    this.renderControls();
    this.store.subscribe(() => this.renderResults());
    this.evaluateNow();
  }

  // -- control handling -----------------------------------------------------

  onControlChange(patch: Partial<ScenarioViewState>): void {
    this.store.update(patch);
    this.syncControls();
    if (this.usePermalink) {
      window.history.replaceState(null, '', encodePermalink(this.store.state));
    }
    if (this.debounceTimer !== null) clearTimeout(this.debounceTimer);
    this.debounceTimer = setTimeout(() => {
      this.debounceTimer = null;
      this.evaluateNow();
    }, this.debounceMs);
  }

  /** Issue the evaluate+cost pair for the current state; if a pair is
   * already in flight, remember to go again when it lands. */
  evaluateNow(): void {
    if (this.inFlight) {
      this.queued = true;
      return;
    }
    const catalogDoc = this.selectedCatalog();
    const datasetDoc = this.selectedDataset();
    if (!catalogDoc || !datasetDoc) {
      this.store.applyError(this.store.nextSeq(), 'select a catalog and a dataset');
      return;
    }
    const scenario = buildScenario(this.store.state, catalogDoc, datasetDoc);
    const grid = requestGrid(this.store.state.numRequests);
    const seq = this.store.nextSeq();
    this.inFlight = true;
    Promise.all([this.client.evaluate(scenario), this.client.cost(scenario, grid)])
      .then(([evaluation, costSeries]) => {
        this.store.applyResults(seq, { evaluation, costSeries });
      })
      .catch((error: unknown) => {
        const message =
          error instanceof ApiRequestError ? error.message : `engine unreachable: ${String(error)}`;
        this.store.applyError(seq, message);
      })
      .finally(() => {
        this.inFlight = false;
        if (this.queued) {
          this.queued = false;
          this.evaluateNow();
        }
      });
  }

  private selectedCatalog(): Record<string, number> | null {
    const entry = this.catalogs.find((c) => c.name === this.store.state.catalog);
    if (!entry) return null;
    return entry.variants[this.store.state.variant] ?? Object.values(entry.variants)[0] ?? null;
  }

  private selectedDataset() {
    const entry = this.datasets.find((d) => d.name === this.store.state.dataset);
    if (!entry) return null;
    return Object.values(entry.variants)[0] ?? null;
  }

  // -- rendering --------------------------------------------------------------

  private renderControls(): void {
    const controls = this.root.querySelector('#controls') as HTMLElement;
    controls.replaceChildren();

    controls.appendChild(this.select('catalog', 'model catalog', this.catalogs.map((c) => c.name)));
    const variants = this.catalogs.find((c) => c.name === this.store.state.catalog)?.variants ?? {};
    controls.appendChild(this.select('variant', 'price variant', Object.keys(variants)));
    controls.appendChild(this.select('dataset', 'dataset', this.datasets.map((d) => d.name)));
    controls.appendChild(this.pipelinePicker());
    controls.appendChild(this.slider('s', 'success rate s', 0, 1, 0.01));
    controls.appendChild(this.slider('r', 'rerun willingness r', 0, 1, 0.01));
    controls.appendChild(this.numberInput('v', 'validation cost v (USD)', 0.01));
    controls.appendChild(this.numberInput('h', 'human cost h (USD)', 0.05));
    controls.appendChild(this.numberInput('numRequests', 'requests over lifetime', 1));
    this.syncControls();
  }

  private slider(key: 's' | 'r', label: string, min: number, max: number, step: number): HTMLElement {
    const wrap = document.createElement('label');
    wrap.className = 'control';
    wrap.textContent = label;
    const input = document.createElement('input');
    input.type = 'range';
    input.min = String(min);
    input.max = String(max);
    input.step = String(step);
    input.id = `control-${key}`;
    input.addEventListener('input', () => this.onControlChange({ [key]: Number(input.value) }));
    const value = document.createElement('span');
    value.id = `value-${key}`;
    wrap.append(input, value);
    return wrap;
  }

  private numberInput(key: 'v' | 'h' | 'numRequests', label: string, step: number): HTMLElement {
    const wrap = document.createElement('label');
    wrap.className = 'control';
    wrap.textContent = label;
    const input = document.createElement('input');
    input.type = 'number';
    input.min = '0';
    input.step = String(step);
    input.id = `control-${key}`;
    input.addEventListener('change', () => this.onControlChange({ [key]: Number(input.value) }));
    wrap.appendChild(input);
    return wrap;
  }

  private select(key: 'catalog' | 'variant' | 'dataset', label: string, options: string[]): HTMLElement {
    const wrap = document.createElement('label');
    wrap.className = 'control';
    wrap.textContent = label;
    const select = document.createElement('select');
    select.id = `control-${key}`;
    for (const option of options) {
      const el = document.createElement('option');
      el.value = option;
      el.textContent = option;
      select.appendChild(el);
    }
    select.addEventListener('change', () => {
      const patch: Partial<ScenarioViewState> = { [key]: select.value };
      if (key === 'catalog') {
        const variants = this.catalogs.find((c) => c.name === select.value)?.variants ?? {};
        patch.variant = Object.keys(variants)[0] ?? 'default';
        this.renderControls();
      }
      this.onControlChange(patch);
    });
    wrap.appendChild(select);
    return wrap;
  }

  private pipelinePicker(): HTMLElement {
    const wrap = document.createElement('fieldset');
    wrap.className = 'control pipelines';
    const legend = document.createElement('legend');
    legend.textContent = 'pipelines';
    wrap.appendChild(legend);
    for (const kind of PIPELINE_KINDS) {
      const label = document.createElement('label');
      const box = document.createElement('input');
      box.type = 'checkbox';
      box.id = `pipeline-${kind}`;
      box.addEventListener('change', () => {
        const selected = PIPELINE_KINDS.filter(
          (k) => (this.root.querySelector(`#pipeline-${k}`) as HTMLInputElement).checked,
        );
        this.onControlChange({ pipelines: selected.length ? selected : [kind] });
      });
      label.append(box, kind);
      wrap.appendChild(label);
    }
    return wrap;
  }

  private syncControls(): void {
    const state = this.store.state;
    const set = (id: string, value: string) => {
      const el = this.root.querySelector(`#${id}`) as HTMLInputElement | HTMLSelectElement | null;
      if (el) el.value = value;
    };
    set('control-s', String(state.s));
    set('control-r', String(state.r));
    set('control-v', String(state.v));
    set('control-h', String(state.h));
    set('control-numRequests', String(state.numRequests));
    set('control-catalog', state.catalog);
    set('control-variant', state.variant);
    set('control-dataset', state.dataset);
    for (const kind of PIPELINE_KINDS) {
      const box = this.root.querySelector(`#pipeline-${kind}`) as HTMLInputElement | null;
      if (box) box.checked = state.pipelines.includes(kind as PipelineKind);
    }
    const sValue = this.root.querySelector('#value-s');
    if (sValue) sValue.textContent = ` ${state.s.toFixed(2)}`;
    const rValue = this.root.querySelector('#value-r');
    if (rValue) rValue.textContent = ` ${state.r.toFixed(2)}`;
  }

  private renderResults(): void {
    const banner = this.root.querySelector('#error-banner') as HTMLElement;
    const bars = this.root.querySelector('#cop-chart') as HTMLElement;
    const lines = this.root.querySelector('#amortization-chart') as HTMLElement;
    const tableContainer = this.root.querySelector('#breakdown') as HTMLElement;
    const meta = this.root.querySelector('#meta') as HTMLElement;

    if (this.store.lastError) {
      banner.textContent = this.store.lastError;
      banner.hidden = false;
      bars.replaceChildren();
      lines.replaceChildren();
      tableContainer.replaceChildren();
      return;
    }
    banner.hidden = true;
    banner.textContent = '';

    const { evaluation, costSeries } = this.store.results;
    if (evaluation) {
      renderCopBars(bars, evaluation);
      renderBreakdownTable(tableContainer, evaluation);
      meta.textContent =
        `${evaluation.tool} ${evaluation.tool_version} · scenario ${evaluation.scenario_hash.slice(0, 12)} · ` +
        evaluation.assumptions.join(' · ');
    }
    if (costSeries) {
      renderAmortization(lines, costSeries);
    }
  }
}
