/** Canvas line chart with segment shading. */

import type { SegmentInfo, SeriesPayload } from './types.js';

export interface PlotGeometry {
  x: (t: number) => number;
  y: (v: number) => number;
}

/** Affine mapping from (sample index, value) to pixel coordinates. */
export function plotGeometry(
  payload: SeriesPayload,
  width: number,
  height: number,
  pad = 8,
): PlotGeometry {
  const values = payload.points.map(([, v]) => v);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  const range = payload.to - payload.from || 1;
  return {
    x: (t) => pad + ((t - payload.from) / range) * (width - 2 * pad),
    y: (v) => height - pad - ((v - lo) / span) * (height - 2 * pad),
  };
}

const SEGMENT_FILL: Record<SegmentInfo['kind'], string | null> = {
  baseline: null,
  chaos: 'rgba(250, 204, 21, 0.25)',
  anomaly: 'rgba(239, 68, 68, 0.25)',
};

export function drawSeries(canvas: HTMLCanvasElement, payload: SeriesPayload): void {
  const ctx = canvas.getContext('2d');
  if (ctx === null || payload.points.length === 0) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const geo = plotGeometry(payload, width, height);

  for (const seg of payload.segments) {
    const fill = SEGMENT_FILL[seg.kind];
    if (fill === null) continue;
    const x0 = geo.x(Math.max(seg.start, payload.from));
    const x1 = geo.x(Math.min(seg.end, payload.to));
    ctx.fillStyle = fill;
    ctx.fillRect(x0, 0, x1 - x0, height);
  }

  ctx.strokeStyle = '#2563eb';
  ctx.lineWidth = 1.25;
  ctx.beginPath();
  payload.points.forEach(([t, v], i) => {
    if (i === 0) ctx.moveTo(geo.x(t), geo.y(v));
    else ctx.lineTo(geo.x(t), geo.y(v));
  });
  ctx.stroke();
}
