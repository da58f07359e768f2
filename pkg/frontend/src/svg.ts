/** Minimal deterministic SVG line charts: fixed size, fonts and palette. */

import { Point } from './series.js';

export interface Channel {
  label: string;
  points: Point[];
  color: string;
  dash?: string;
}

export interface Band {
  lo: Point[];
  hi: Point[];
  color: string;
  opacity: number;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  channels: Channel[];
  bands?: Band[];
  logY?: boolean;
  width?: number;
  height?: number;
}

export const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b'];

const MARGIN = { top: 42, right: 24, bottom: 48, left: 72 };
const LOG_FLOOR = 1e-12;

function fmt(v: number): string {
  if (!Number.isFinite(v)) return '0';
  return Number(v.toPrecision(6)).toString();
}

function tickLabel(v: number): string {
  if (v !== 0 && (Math.abs(v) < 1e-3 || Math.abs(v) >= 1e4)) {
    return v.toExponential(0);
  }
  return Number(v.toPrecision(4)).toString();
}

class Scale {
  constructor(
    private lo: number,
    private hi: number,
    private outLo: number,
    private outHi: number,
    private log: boolean,
  ) {}

  apply(v: number): number {
    const x = this.log ? Math.log10(Math.max(v, LOG_FLOOR)) : v;
    const t = (x - this.lo) / (this.hi - this.lo || 1);
    return this.outLo + t * (this.outHi - this.outLo);
  }

  ticks(count: number): number[] {
    const out: number[] = [];
    for (let k = 0; k <= count; k++) {
      const x = this.lo + ((this.hi - this.lo) * k) / count;
      out.push(this.log ? Math.pow(10, x) : x);
    }
    return out;
  }
}

export function renderChart(spec: ChartSpec): string {
  const width = spec.width ?? 840;
  const height = spec.height ?? 520;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs: number[] = [];
  const ys: number[] = [];
  for (const ch of spec.channels) {
    for (const p of ch.points) {
      xs.push(p.x);
      ys.push(p.y);
    }
  }
  for (const band of spec.bands ?? []) {
    for (const p of [...band.lo, ...band.hi]) {
      xs.push(p.x);
      ys.push(p.y);
    }
  }
  if (xs.length === 0) {
    throw new Error('nothing to plot');
  }
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (spec.logY) {
    yLo = Math.log10(Math.max(yLo, LOG_FLOOR));
    yHi = Math.log10(Math.max(yHi, LOG_FLOOR));
    if (yHi === yLo) yHi = yLo + 1;
    yLo = Math.floor(yLo);
    yHi = Math.ceil(yHi);
  } else if (yHi === yLo) {
    yHi = yLo + 1;
  }
  const sx = new Scale(xLo, xHi, MARGIN.left, MARGIN.left + plotW, false);
  const sy = new Scale(yHi, yLo, MARGIN.top, MARGIN.top + plotH, spec.logY ?? false);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${width / 2}" y="24" text-anchor="middle" font-size="16">${escapeXml(spec.title)}</text>`,
  );

  // axes with ticks and grid lines
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + plotH;
  for (const t of sx.ticks(6)) {
    const px = fmt(sx.apply(t));
    parts.push(
      `<line x1="${px}" y1="${MARGIN.top}" x2="${px}" y2="${y0}" stroke="#dddddd" stroke-width="1"/>`,
      `<text x="${px}" y="${y0 + 18}" text-anchor="middle" font-size="11">${tickLabel(t)}</text>`,
    );
  }
  const yTickCount = spec.logY ? Math.max(1, Math.min(8, Math.round(yHi - yLo))) : 5;
  for (const t of sy.ticks(yTickCount)) {
    const py = fmt(sy.apply(t));
    parts.push(
      `<line x1="${x0}" y1="${py}" x2="${x0 + plotW}" y2="${py}" stroke="#dddddd" stroke-width="1"/>`,
      `<text x="${x0 - 6}" y="${py}" text-anchor="end" dominant-baseline="middle" font-size="11">${tickLabel(t)}</text>`,
    );
  }
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x0 + plotW}" y2="${y0}" stroke="#000000" stroke-width="1"/>`,
    `<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}" stroke="#000000" stroke-width="1"/>`,
    `<text x="${x0 + plotW / 2}" y="${height - 10}" text-anchor="middle" font-size="13">${escapeXml(spec.xLabel)}</text>`,
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">${escapeXml(spec.yLabel)}</text>`,
  );

  for (const band of spec.bands ?? []) {
    const forward = band.hi.map((p) => `${fmt(sx.apply(p.x))},${fmt(sy.apply(p.y))}`);
    const backward = [...band.lo]
      .reverse()
      .map((p) => `${fmt(sx.apply(p.x))},${fmt(sy.apply(p.y))}`);
    parts.push(
      `<polygon points="${[...forward, ...backward].join(' ')}" fill="${band.color}" fill-opacity="${band.opacity}" stroke="none"/>`,
    );
  }

  for (const ch of spec.channels) {
    const pts = ch.points
      .map((p) => `${fmt(sx.apply(p.x))},${fmt(sy.apply(p.y))}`)
      .join(' ');
    const dash = ch.dash ? ` stroke-dasharray="${ch.dash}"` : '';
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${ch.color}" stroke-width="1.8"${dash}/>`,
    );
  }

  // legend, top-right inside the plot area
  spec.channels.forEach((ch, k) => {
    const ly = MARGIN.top + 16 + 18 * k;
    const lx = x0 + plotW - 180;
    const dash = ch.dash ? ` stroke-dasharray="${ch.dash}"` : '';
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 26}" y2="${ly}" stroke="${ch.color}" stroke-width="1.8"${dash}/>`,
      `<text x="${lx + 32}" y="${ly}" dominant-baseline="middle" font-size="12">${escapeXml(ch.label)}</text>`,
    );
  });

  parts.push('</svg>');
  return parts.join('\n') + '\n';
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}
