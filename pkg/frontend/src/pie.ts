// Pie geometry for chart data delivered by the API. Slice order and all
// numbers come straight from the server; this module only draws.

import type { ChartDoc } from './api.js';

export interface PieSegment {
  label: string;
  count: number;
  // Displayed percent for top-5 slices comes from the API; the "other"
  // remainder has no server percent and is labeled by count alone.
  percent: number | null;
  startAngle: number; // radians, 0 = 12 o'clock, clockwise
  endAngle: number;
  color: string;
}

const PALETTE = ['#4e79a7', '#f28e2b', '#e15759', '#76b7b2', '#59a14f', '#bab0ab'];

export function pieSegments(chart: ChartDoc): PieSegment[] {
  const slices = chart.slices.map((s, i) => ({
    label: s.label,
    count: s.count,
    percent: s.percent as number | null,
    color: PALETTE[i % PALETTE.length],
  }));
  if (chart.other_count > 0) {
    slices.push({
      label: 'other',
      count: chart.other_count,
      percent: null,
      color: PALETTE[5],
    });
  }
  const total = slices.reduce((acc, s) => acc + s.count, 0);
  const segments: PieSegment[] = [];
  let angle = 0;
  for (const s of slices) {
    const sweep = total > 0 ? (s.count / total) * 2 * Math.PI : 0;
    segments.push({ ...s, startAngle: angle, endAngle: angle + sweep });
    angle += sweep;
  }
  return segments;
}

function arcPoint(cx: number, cy: number, r: number, angle: number): [number, number] {
  // Angle 0 points up; positive angles go clockwise.
  return [cx + r * Math.sin(angle), cy - r * Math.cos(angle)];
}

export function pieSvg(chart: ChartDoc, size = 260): string {
  const segments = pieSegments(chart);
  const cx = size / 2;
  const cy = size / 2;
  const r = size / 2 - 4;
  const paths = segments.map((seg) => {
    const [x0, y0] = arcPoint(cx, cy, r, seg.startAngle);
    const [x1, y1] = arcPoint(cx, cy, r, seg.endAngle);
    const largeArc = seg.endAngle - seg.startAngle > Math.PI ? 1 : 0;
    const title = seg.percent === null
      ? `${seg.label}: ${seg.count} CVEs`
      : `${seg.label}: ${seg.count} CVEs (${seg.percent}%)`;
    if (seg.endAngle - seg.startAngle >= 2 * Math.PI - 1e-9) {
      return `<circle cx="${cx}" cy="${cy}" r="${r}" fill="${seg.color}"><title>${title}</title></circle>`;
    }
    const d = `M ${cx} ${cy} L ${x0.toFixed(2)} ${y0.toFixed(2)} ` +
      `A ${r} ${r} 0 ${largeArc} 1 ${x1.toFixed(2)} ${y1.toFixed(2)} Z`;
    return `<path d="${d}" fill="${seg.color}" stroke="#fff" stroke-width="1"><title>${title}</title></path>`;
  });
  const legend = segments.map((seg, i) => {
    const text = seg.percent === null ? `${seg.label} (${seg.count})` : `${seg.label} (${seg.percent}%)`;
    return `<g transform="translate(${size + 12}, ${14 + i * 20})">` +
      `<rect width="12" height="12" fill="${seg.color}"/>` +
      `<text x="18" y="11" font-size="13">${text}</text></g>`;
  });
  return `<svg viewBox="0 0 ${size + 170} ${size}" width="${size + 170}" height="${size}">` +
    `${paths.join('')}${legend.join('')}</svg>`;
}
