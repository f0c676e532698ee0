/** Session state for the console.
 *
 * The console never recomputes blames or counterfactuals; it only holds
 * API payloads and selection state. One diagnosis request may be in
 * flight at a time; what-if requests are order-stamped so concurrent
 * responses land in issue order in the history.
 */

import type {
  DiagnosisPayload,
  GraphPayload,
  WhatIfHistoryEntry,
  WhatIfPayload,
  WindowSpec,
} from './types.js';

export function ancestorsOf(graph: GraphPayload, target: string): Set<string> {
  const parents = new Map<string, string[]>();
  for (const [p, c] of graph.edges) {
    const list = parents.get(c) ?? [];
    list.push(p);
    parents.set(c, list);
  }
  const found = new Set<string>();
  const frontier = [target];
  while (frontier.length > 0) {
    const node = frontier.pop()!;
    for (const parent of parents.get(node) ?? []) {
      if (!found.has(parent)) {
        found.add(parent);
        frontier.push(parent);
      }
    }
  }
  found.delete(target);
  return found;
}

/** KPIs offered in the what-if form: ancestors of the target, KPIs only. */
export function intervenableKpis(graph: GraphPayload, target: string): string[] {
  return [...ancestorsOf(graph, target)]
    .filter((n) => graph.node_kinds[n] !== 'chaos-variable')
    .sort();
}

export class ConsoleState {
  graph: GraphPayload | null = null;
  target: string | null = null;
  window: WindowSpec | null = null;
  diagnosis: DiagnosisPayload | null = null;
  selectedCause: string | null = null;
  /** Draft interventions keyed by KPI, as entered in the form. */
  interventions = new Map<string, number>();

  private diagnosisInFlight = false;
  private whatIfSeq = 0;
  private readonly history: WhatIfHistoryEntry[] = [];

  /** Returns false while another diagnosis is still running. */
  beginDiagnosis(): boolean {
    if (this.diagnosisInFlight) return false;
    this.diagnosisInFlight = true;
    return true;
  }

  finishDiagnosis(payload: DiagnosisPayload | null): void {
    this.diagnosisInFlight = false;
    if (payload !== null) {
      this.diagnosis = payload;
      this.selectedCause = null;
    }
  }

  /** Clicking a ranked row pre-fills the form with the candidate at its
   * baseline-mean value from the graph metadata. */
  selectCause(kpi: string): number | null {
    if (this.graph === null || !(kpi in this.graph.baseline_means)) return null;
    const value = this.graph.baseline_means[kpi];
    this.selectedCause = kpi;
    this.interventions.set(kpi, value);
    return value;
  }

  nextWhatIfSeq(): number {
    this.whatIfSeq += 1;
    return this.whatIfSeq;
  }

  recordWhatIf(
    seq: number,
    target: string,
    window: WindowSpec,
    interventions: Record<string, number>,
    response: WhatIfPayload,
  ): void {
    const entry: WhatIfHistoryEntry = { seq, target, window, interventions, response };
    // insertion keeps issue order even when responses race
    const at = this.history.findIndex((e) => e.seq > seq);
    if (at === -1) this.history.push(entry);
    else this.history.splice(at, 0, entry);
  }

  /** Append-only view of past what-if queries. */
  get whatIfHistory(): readonly WhatIfHistoryEntry[] {
    return this.history;
  }
}
