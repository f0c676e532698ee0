import { describe, expect, it } from 'vitest';

import { plotGeometry } from '../src/chart.js';
import type { SeriesPayload } from '../src/types.js';

function series(points: [number, number][], from: number, to: number): SeriesPayload {
  return { kpi: 'tps', from, to, stride: 1, points, segments: [] };
}

describe('plot geometry', () => {
  it('maps window edges to the padded canvas edges', () => {
    const geo = plotGeometry(series([[0, 1], [100, 2]], 0, 100), 860, 240, 8);
    expect(geo.x(0)).toBe(8);
    expect(geo.x(100)).toBe(860 - 8);
  });

  it('maps the value range to the vertical extent, inverted', () => {
    const geo = plotGeometry(series([[0, 10], [1, 30]], 0, 2), 100, 100, 10);
    expect(geo.y(10)).toBe(90); // min at the bottom
    expect(geo.y(30)).toBe(10); // max at the top
  });

  it('handles constant series without dividing by zero', () => {
    const geo = plotGeometry(series([[0, 5], [1, 5]], 0, 2), 100, 100);
    expect(Number.isFinite(geo.y(5))).toBe(true);
  });

  it('copes with the server-side 2000-point cap', () => {
    const pts: [number, number][] = Array.from({ length: 2000 }, (_, i) => [i, i % 7]);
    const geo = plotGeometry(series(pts, 0, 1999), 860, 240);
    expect(geo.x(1999)).toBeLessThanOrEqual(860);
  });
});
