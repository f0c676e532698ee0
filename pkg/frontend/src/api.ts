/** Typed client for the diagnosis service.
 *
 * Every request is appended to `log`, so any sequence of UI actions maps
 * to a replayable sequence of API calls.
 */

import type {
  ApiErrorPayload,
  DiagnosisPayload,
  GraphPayload,
  KpiInfo,
  SeriesPayload,
  WhatIfPayload,
  WindowSpec,
} from './types.js';

export interface LoggedCall {
  seq: number;
  method: 'GET' | 'POST';
  path: string;
  body: unknown | null;
}

export class ApiError extends Error {
  readonly payload: ApiErrorPayload;

  constructor(payload: ApiErrorPayload) {
    super(payload.message);
    this.payload = payload;
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  readonly log: LoggedCall[] = [];
  private readonly fetchFn: FetchLike;
  private readonly base: string;

  constructor(base = '', fetchFn: FetchLike = (u, i) => fetch(u, i)) {
    this.base = base;
    this.fetchFn = fetchFn;
  }

  private async request<T>(method: 'GET' | 'POST', path: string, body: unknown | null): Promise<T> {
    this.log.push({ seq: this.log.length, method, path, body });
    const init: RequestInit = { method };
    if (body !== null) {
      init.headers = { 'Content-Type': 'application/json' };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(payload as ApiErrorPayload);
    }
    return payload as T;
  }

  getKpis(): Promise<KpiInfo[]> {
    return this.request('GET', '/api/kpis', null);
  }

  getGraph(): Promise<GraphPayload> {
    return this.request('GET', '/api/graph', null);
  }

  getSeries(kpi: string, from?: number, to?: number): Promise<SeriesPayload> {
    const params = new URLSearchParams({ kpi });
    if (from !== undefined) params.set('from', String(from));
    if (to !== undefined) params.set('to', String(to));
    return this.request('GET', `/api/series?${params.toString()}`, null);
  }

  postDiagnose(target: string, window: WindowSpec, topK: number): Promise<DiagnosisPayload> {
    return this.request('POST', '/api/diagnose', { target, window, top_k: topK });
  }

  postWhatIf(
    target: string,
    window: WindowSpec,
    interventions: Record<string, number>,
  ): Promise<WhatIfPayload> {
    return this.request('POST', '/api/whatif', { target, window, interventions });
  }

  /** Re-issue the logged calls in order against another transport. */
  async replay(fetchFn: FetchLike, base = this.base): Promise<void> {
    for (const call of [...this.log]) {
      const init: RequestInit = { method: call.method };
      if (call.body !== null) {
        init.headers = { 'Content-Type': 'application/json' };
        init.body = JSON.stringify(call.body);
      }
      await fetchFn(base + call.path, init);
    }
  }
}
