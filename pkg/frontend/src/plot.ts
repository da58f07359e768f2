/** Figure assembly for the three supported kinds. */

import { basename } from 'path';

import { listVariantDirs, loadPresetDir, PresetData } from './data.js';
import { errorBand, meanAcross, survivalCurve, Point } from './series.js';
import { Channel, PALETTE, renderChart } from './svg.js';

export type FigureKind = 'convergence' | 'sweep' | 'tail-bound';

export function renderFigure(kind: FigureKind, dir: string, logY = false): string {
  switch (kind) {
    case 'convergence':
      return renderConvergence(loadPresetDir(dir), logY);
    case 'sweep':
      return renderSweep(dir, logY);
    case 'tail-bound':
      return renderTailBound(loadPresetDir(dir));
    default:
      throw new Error(`unknown figure kind "${kind}"`);
  }
}

export function renderConvergence(data: PresetData, logY = false): string {
  const mean = meanAcross(data.trials, 'mse');
  const band = errorBand(data.trials);
  const label = data.aggregate?.preset ?? basename(data.dir);
  return renderChart({
    title: `Opinion error, ${label} (${data.trials.length} trials)`,
    xLabel: 'round',
    yLabel: logY ? 'squared error (log)' : 'squared error',
    logY,
    channels: [{ label: 'mean MSE', points: mean, color: PALETTE[0] }],
    bands: [{ lo: band.lo, hi: band.hi, color: PALETTE[0], opacity: 0.18 }],
  });
}

export function renderSweep(dir: string, logY = false): string {
  const variants = listVariantDirs(dir);
  const channels: Channel[] = variants.map((sub, k) => {
    const data = loadPresetDir(sub);
    return {
      label: basename(sub),
      points: meanAcross(data.trials, 'mse'),
      color: PALETTE[k % PALETTE.length],
    };
  });
  return renderChart({
    title: `Mean MSE sweep, ${basename(dir)}`,
    xLabel: 'round',
    yLabel: logY ? 'mean MSE (log)' : 'mean MSE',
    logY,
    channels,
  });
}

export function renderTailBound(data: PresetData): string {
  if (!data.aggregate) {
    throw new Error(`${data.dir}: aggregate.json is required for tail-bound plots`);
  }
  const curve = data.analysis?.bounds?.survival_bound;
  if (!curve) {
    throw new Error(
      `${data.dir}: analysis.json carries no survival_bound curve`,
    );
  }
  const horizon = curve.t[curve.t.length - 1];
  const empirical = survivalCurve(data.aggregate.t_hat_max_values, horizon);
  const bound: Point[] = curve.t.map((t, k) => ({ x: t, y: curve.p[k] }));
  return renderChart({
    title: `Stopping-time tail vs bound, ${data.aggregate.preset}`,
    xLabel: 'round t',
    yLabel: 'P(stopping time >= t)',
    channels: [
      { label: 'upper bound', points: bound, color: PALETTE[1], dash: '6 3' },
      { label: 'empirical survival', points: empirical, color: PALETTE[0] },
    ],
  });
}
