/** Aggregation of ragged per-trial series into plottable curves. */

import { TrialSeries } from './csv.js';

export interface Point {
  x: number;
  y: number;
}

/** Mean of a field per round across the trials that reached that round. */
export function meanAcross(
  trials: TrialSeries[],
  field: 'mse' | 'maxErr' | 'minErr',
): Point[] {
  const horizon = Math.max(...trials.map((t) => t.round.length));
  const points: Point[] = [];
  for (let t = 0; t < horizon; t++) {
    let sum = 0;
    let count = 0;
    for (const trial of trials) {
      if (t < trial[field].length) {
        sum += trial[field][t];
        count += 1;
      }
    }
    points.push({ x: t, y: sum / count });
  }
  return points;
}

/** Per-round [min(minErr), max(maxErr)] envelope across trials. */
export function errorBand(trials: TrialSeries[]): { lo: Point[]; hi: Point[] } {
  const horizon = Math.max(...trials.map((t) => t.round.length));
  const lo: Point[] = [];
  const hi: Point[] = [];
  for (let t = 0; t < horizon; t++) {
    let low = Infinity;
    let high = -Infinity;
    for (const trial of trials) {
      if (t < trial.round.length) {
        low = Math.min(low, trial.minErr[t]);
        high = Math.max(high, trial.maxErr[t]);
      }
    }
    lo.push({ x: t, y: low });
    hi.push({ x: t, y: high });
  }
  return { lo, hi };
}

/** Empirical survival curve P(T >= t); missing stopping times never stop. */
export function survivalCurve(
  values: (number | null)[],
  horizon: number,
): Point[] {
  const points: Point[] = [];
  for (let t = 0; t <= horizon; t++) {
    const surviving = values.filter((v) => v === null || v >= t).length;
    points.push({ x: t, y: surviving / values.length });
  }
  return points;
}
