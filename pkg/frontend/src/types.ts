/** JSON payload shapes of the diagnosis service. */

export interface KpiInfo {
  name: string;
  unit: string;
  kind: 'kpi' | 'chaos-variable';
  description: string | null;
}

export interface GraphPayload {
  nodes: string[];
  edges: [string, string][];
  baseline_means: Record<string, number>;
  node_kinds: Record<string, string>;
}

export interface SegmentInfo {
  kind: 'baseline' | 'chaos' | 'anomaly';
  variable: string | null;
  level: number | null;
  anomaly_kind: string | null;
  start: number;
  end: number;
}

export interface SeriesPayload {
  kpi: string;
  from: number;
  to: number;
  stride: number;
  points: [number, number][];
  segments: SegmentInfo[];
}

export interface WindowSpec {
  from: number;
  to: number;
}

export interface DiagnosisEntry {
  kpi: string;
  blame: number;
  y_hat: number;
  delta: number;
}

export interface DiagnosisPayload {
  target: string;
  observed_y: number;
  entries: DiagnosisEntry[];
}

export interface WhatIfPayload {
  y: number;
  y_hat: number;
  delta: number;
  per_node_shifts: Record<string, number>;
}

export interface ApiErrorPayload {
  code: 'not_found' | 'bad_request' | 'not_ready' | 'internal';
  message: string;
  detail: Record<string, unknown>;
}

export interface WhatIfHistoryEntry {
  seq: number;
  target: string;
  window: WindowSpec;
  interventions: Record<string, number>;
  response: WhatIfPayload;
}
