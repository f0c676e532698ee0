/** Pure HTML renderers.
 *
 * Numbers are displayed with String(value), i.e. exactly the numbers the
 * API returned; the console never rounds, rescales or recomputes them.
 */

import type {
  DiagnosisPayload,
  KpiInfo,
  WhatIfHistoryEntry,
  WhatIfPayload,
} from './types.js';

export function esc(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function num(value: number): string {
  return String(value);
}

export function renderKpiOptions(kpis: KpiInfo[], selected: string | null): string {
  return kpis
    .filter((k) => k.kind === 'kpi')
    .map((k) => {
      const sel = k.name === selected ? ' selected' : '';
      return `<option value="${esc(k.name)}"${sel}>${esc(k.name)}</option>`;
    })
    .join('');
}

/** Ranked root causes, in exactly the order the API returned them. */
export function renderDiagnosisTable(payload: DiagnosisPayload): string {
  if (payload.entries.length === 0) {
    return `<p class="empty">No positive-blame ancestors for ` +
      `<strong>${esc(payload.target)}</strong> in this window.</p>`;
  }
  const rows = payload.entries
    .map((e, i) =>
      `<tr data-kpi="${esc(e.kpi)}">` +
      `<td>${i + 1}</td>` +
      `<td class="kpi">${esc(e.kpi)}</td>` +
      `<td class="n">${num(e.blame)}</td>` +
      `<td class="n">${num(e.y_hat)}</td>` +
      `<td class="n">${num(e.delta)}</td>` +
      `</tr>`)
    .join('');
  return (
    `<table class="diagnosis">` +
    `<thead><tr><th>#</th><th>KPI</th><th>blame</th>` +
    `<th>counterfactual ŷ</th><th>Δ from observed</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>` +
    `<p class="note">observed ${esc(payload.target)} = ${num(payload.observed_y)}</p>`
  );
}

export function renderWhatIfResult(payload: WhatIfPayload): string {
  return (
    `<dl class="whatif-result">` +
    `<dt>observed y</dt><dd class="n" data-field="y">${num(payload.y)}</dd>` +
    `<dt>predicted ŷ</dt><dd class="n" data-field="y_hat">${num(payload.y_hat)}</dd>` +
    `<dt>Δ</dt><dd class="n" data-field="delta">${num(payload.delta)}</dd>` +
    `</dl>`
  );
}

export function renderHistory(entries: readonly WhatIfHistoryEntry[]): string {
  if (entries.length === 0) {
    return '<p class="empty">No what-if queries yet.</p>';
  }
  const items = entries
    .map((e) => {
      const sets = Object.entries(e.interventions)
        .map(([k, v]) => `${esc(k)}=${num(v)}`)
        .join(', ');
      return (
        `<li data-seq="${e.seq}"><span class="seq">#${e.seq}</span> ` +
        `${esc(e.target)} | ${sets} → ŷ=${num(e.response.y_hat)} ` +
        `(Δ ${num(e.response.delta)})</li>`
      );
    })
    .join('');
  return `<ol class="history">${items}</ol>`;
}

export function renderError(message: string): string {
  return `<p class="error">${esc(message)}</p>`;
}

export function renderEmptyChartMessage(kpi: string): string {
  return `<p class="empty">No samples for ${esc(kpi)} in this window.</p>`;
}
