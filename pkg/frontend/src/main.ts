/** DOM wiring for the console. All semantics live server-side. */

import { ApiClient, ApiError } from './api.js';
import { drawSeries } from './chart.js';
import {
  renderDiagnosisTable,
  renderEmptyChartMessage,
  renderError,
  renderHistory,
  renderKpiOptions,
  renderWhatIfResult,
  num,
} from './render.js';
import { ConsoleState, intervenableKpis } from './state.js';
import type { WindowSpec } from './types.js';

const api = new ApiClient();
const state = new ConsoleState();

const $ = <T extends HTMLElement>(sel: string): T => {
  const el = document.querySelector<T>(sel);
  if (el === null) throw new Error(`missing element ${sel}`);
  return el;
};

function currentWindow(): WindowSpec {
  return {
    from: Number(($('#win-from') as HTMLInputElement).value),
    to: Number(($('#win-to') as HTMLInputElement).value),
  };
}

function setBanner(html: string): void {
  $('#banner').innerHTML = html;
}

async function refreshSeries(): Promise<void> {
  const kpi = ($('#series-kpi') as HTMLSelectElement).value;
  const w = currentWindow();
  try {
    const payload = await api.getSeries(kpi, w.from, w.to);
    const holder = $('#chart-holder');
    if (payload.points.length === 0) {
      holder.innerHTML = renderEmptyChartMessage(kpi);
      return;
    }
    holder.innerHTML = '<canvas id="chart" width="860" height="240"></canvas>';
    drawSeries($('#chart') as HTMLCanvasElement, payload);
    setBanner('');
  } catch (err) {
    setBanner(renderError(err instanceof ApiError ? err.message : String(err)));
  }
}

function rebuildInterventionChoices(): void {
  if (state.graph === null || state.target === null) return;
  const select = $('#whatif-kpi') as HTMLSelectElement;
  const options = intervenableKpis(state.graph, state.target)
    .map((n) => `<option value="${n}">${n}</option>`)
    .join('');
  select.innerHTML = options;
}

async function runDiagnosis(): Promise<void> {
  if (!state.beginDiagnosis()) return; // one in flight at a time
  const target = ($('#target') as HTMLSelectElement).value;
  const w = currentWindow();
  const topK = Number(($('#top-k') as HTMLInputElement).value) || 5;
  state.target = target;
  state.window = w;
  try {
    const payload = await api.postDiagnose(target, w, topK);
    state.finishDiagnosis(payload);
    $('#diagnosis').innerHTML = renderDiagnosisTable(payload);
    rebuildInterventionChoices();
    for (const row of document.querySelectorAll<HTMLTableRowElement>('tr[data-kpi]')) {
      row.addEventListener('click', () => {
        const kpi = row.dataset.kpi!;
        const value = state.selectCause(kpi);
        if (value !== null) {
          ($('#whatif-kpi') as HTMLSelectElement).value = kpi;
          ($('#whatif-value') as HTMLInputElement).value = num(value);
        }
      });
    }
    setBanner('');
  } catch (err) {
    state.finishDiagnosis(null);
    setBanner(renderError(err instanceof ApiError ? err.message : String(err)));
  }
}

async function runWhatIf(): Promise<void> {
  if (state.target === null || state.window === null) {
    setBanner(renderError('run a diagnosis first'));
    return;
  }
  const kpi = ($('#whatif-kpi') as HTMLSelectElement).value;
  const value = Number(($('#whatif-value') as HTMLInputElement).value);
  if (kpi === '' || Number.isNaN(value)) {
    setBanner(renderError('pick a KPI and a numeric value'));
    return;
  }
  state.interventions.set(kpi, value);
  const interventions = Object.fromEntries(state.interventions);
  const seq = state.nextWhatIfSeq();
  const { target, window: w } = state;
  try {
    const payload = await api.postWhatIf(target, w, interventions);
    state.recordWhatIf(seq, target, w, interventions, payload);
    $('#whatif-result').innerHTML = renderWhatIfResult(payload);
    $('#history').innerHTML = renderHistory(state.whatIfHistory);
    setBanner('');
  } catch (err) {
    setBanner(renderError(err instanceof ApiError ? err.message : String(err)));
  }
}

async function boot(): Promise<void> {
  try {
    const [kpis, graph] = await Promise.all([api.getKpis(), api.getGraph()]);
    state.graph = graph;
    $('#series-kpi').innerHTML = renderKpiOptions(kpis, null);
    $('#target').innerHTML = renderKpiOptions(kpis, null);
    await refreshSeries();
  } catch (err) {
    setBanner(renderError(err instanceof ApiError ? err.message : String(err)));
  }
}

$('#series-refresh').addEventListener('click', () => void refreshSeries());
$('#diagnose').addEventListener('click', () => void runDiagnosis());
$('#whatif-run').addEventListener('click', () => void runWhatIf());
$('#whatif-clear').addEventListener('click', () => {
  state.interventions.clear();
  $('#whatif-result').innerHTML = '';
});

void boot();
