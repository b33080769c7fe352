/** Hand-rolled SVG charts: grouped cost-of-pass bars with the human-cost
 * reference line, and a cost-over-requests line chart.  Values are rendered
 * verbatim (data-value attributes carry the exact engine numbers). */

import { display, money } from './format';
import type { CostResponse, EvaluateResponse, PipelineKind } from './types';

const COLORS: Record<PipelineKind, string> = {
  Base: '#4e79a7',
  FT: '#f28e2b',
  RAG: '#59a14f',
  FT_RAG: '#b07aa1',
};

const WIDTH = 640;
const HEIGHT = 300;
const MARGIN = { top: 24, right: 16, bottom: 40, left: 64 };

function svgElement(tag: string, attrs: Record<string, string | number>): SVGElement {
  const el = document.createElementNS('http://www.w3.org/2000/svg', tag);
  for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, String(value));
  return el;
}

function svgRoot(): SVGElement {
  return svgElement('svg', {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    width: '100%',
    role: 'img',
  });
}

export function renderCopBars(container: HTMLElement, response: EvaluateResponse): void {
  container.replaceChildren();
  const svg = svgRoot();
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const entries = response.pipelines.filter((p) => p.cop);
  if (!entries.length) return;
  const h = entries[0].economics?.h ?? 1;
  const maxValue = Math.max(h, ...entries.map((p) => p.cop!.cop_ex)) * 1.15;
  const yScale = (value: number) => MARGIN.top + plotH * (1 - value / maxValue);

  const slot = plotW / entries.length;
  entries.forEach((pipeline, index) => {
    const value = pipeline.cop!.cop_ex;
    const barWidth = Math.min(72, slot * 0.6);
    const x = MARGIN.left + slot * index + (slot - barWidth) / 2;
    const y = yScale(value);
    const bar = svgElement('rect', {
      x,
      y,
      width: barWidth,
      height: MARGIN.top + plotH - y,
      fill: COLORS[pipeline.kind],
      'data-kind': pipeline.kind,
      'data-value': display(value),
      class: 'cop-bar',
    });
    svg.appendChild(bar);
    const label = svgElement('text', {
      x: x + barWidth / 2,
      y: HEIGHT - MARGIN.bottom + 16,
      'text-anchor': 'middle',
      class: 'axis-label',
    });
    label.textContent = pipeline.kind;
    svg.appendChild(label);
    const valueLabel = svgElement('text', {
      x: x + barWidth / 2,
      y: y - 6,
      'text-anchor': 'middle',
      class: 'value-label',
      'data-kind': pipeline.kind,
    });
    valueLabel.textContent = money(value);
    svg.appendChild(valueLabel);
    if (value > h) {
      const badge = svgElement('text', {
        x: x + barWidth / 2,
        y: y - 20,
        'text-anchor': 'middle',
        class: 'backfire-badge',
        'data-kind': pipeline.kind,
      });
      badge.textContent = 'costlier than manual';
      svg.appendChild(badge);
    }
  });

  const humanY = yScale(h);
  svg.appendChild(
    svgElement('line', {
      x1: MARGIN.left,
      x2: WIDTH - MARGIN.right,
      y1: humanY,
      y2: humanY,
      class: 'human-line',
      'data-value': display(h),
      stroke: '#d62728',
      'stroke-dasharray': '6 4',
    }),
  );
  const humanLabel = svgElement('text', {
    x: WIDTH - MARGIN.right,
    y: humanY - 6,
    'text-anchor': 'end',
    class: 'human-label',
  });
  humanLabel.textContent = `human cost ${money(h)}`;
  svg.appendChild(humanLabel);

  container.appendChild(svg);
}

export function renderAmortization(container: HTMLElement, response: CostResponse): void {
  container.replaceChildren();
  const svg = svgRoot();
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const allRows = response.series.flatMap((series) => series.rows);
  if (!allRows.length) return;
  const xs = allRows.map((row) => Math.log10(row.num_rl));
  const ys = allRows.map((row) => row.total);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs, xMin + 1e-9);
  const yMax = Math.max(...ys) * 1.1;
  const xScale = (n: number) => MARGIN.left + (plotW * (Math.log10(n) - xMin)) / (xMax - xMin);
  const yScale = (value: number) => MARGIN.top + plotH * (1 - value / yMax);

  for (const series of response.series) {
    const points = series.rows
      .map((row) => `${xScale(row.num_rl).toFixed(2)},${yScale(row.total).toFixed(2)}`)
      .join(' ');
    svg.appendChild(
      svgElement('polyline', {
        points,
        fill: 'none',
        stroke: COLORS[series.kind],
        'stroke-width': 2,
        'data-kind': series.kind,
        class: 'amortization-line',
      }),
    );
    for (const row of series.rows) {
      svg.appendChild(
        svgElement('circle', {
          cx: xScale(row.num_rl),
          cy: yScale(row.total),
          r: 3,
          fill: COLORS[series.kind],
          'data-kind': series.kind,
          'data-num-rl': row.num_rl,
          'data-value': display(row.total),
        }),
      );
    }
  }

  for (const row of response.series[0]?.rows ?? []) {
    const tick = svgElement('text', {
      x: xScale(row.num_rl),
      y: HEIGHT - MARGIN.bottom + 16,
      'text-anchor': 'middle',
      class: 'axis-label',
    });
    tick.textContent = row.num_rl >= 1e6 ? `${row.num_rl / 1e6}M` : row.num_rl >= 1e3 ? `${row.num_rl / 1e3}k` : String(row.num_rl);
    svg.appendChild(tick);
  }

  container.appendChild(svg);
}

export function renderBreakdownTable(container: HTMLElement, response: EvaluateResponse): void {
  container.replaceChildren();
  const table = document.createElement('table');
  table.className = 'breakdown';
  const header = document.createElement('tr');
  const columns = [
    'pipeline', 'embedding', 'retrieval', 'training', 'hosting', 'input', 'output',
    'total (g)', 'cop_ex', 'break-even s',
  ];
  for (const column of columns) {
    const th = document.createElement('th');
    th.textContent = column;
    header.appendChild(th);
  }
  table.appendChild(header);

  for (const pipeline of response.pipelines) {
    const row = document.createElement('tr');
    row.dataset.kind = pipeline.kind;
    const cells: (string | number | null)[] = [
      pipeline.kind,
      pipeline.breakdown.embedding,
      pipeline.breakdown.retrieval,
      pipeline.breakdown.training,
      pipeline.breakdown.hosting,
      pipeline.breakdown.input,
      pipeline.breakdown.output,
      pipeline.breakdown.total,
      pipeline.cop ? pipeline.cop.cop_ex : null,
      pipeline.break_even,
    ];
    cells.forEach((value, index) => {
      const td = document.createElement('td');
      if (typeof value === 'number') {
        td.textContent = display(value);
        td.dataset.value = display(value);
        td.dataset.column = columns[index];
      } else {
        td.textContent = value ?? 'never';
      }
      row.appendChild(td);
    });
    table.appendChild(row);
  }
  container.appendChild(table);
}
