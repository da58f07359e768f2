/**
 * End-to-end: drive the simulator CLI to produce a real experiment
 * directory, then render figures from its files alone.
 */

import { execFileSync } from 'child_process';
import { mkdtempSync, readFileSync, writeFileSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';

import { beforeAll, describe, expect, it } from 'vitest';

import { loadPresetDir } from '../src/data.js';
import { survivalCurve } from '../src/series.js';
import { renderFigure } from '../src/plot.js';
import { main } from '../src/cli.js';

let outRoot: string;
let presetDir: string;

beforeAll(() => {
  outRoot = mkdtempSync(join(tmpdir(), 'trustprop-plots-'));
  execFileSync(
    'python3',
    [
      '-m', 'trustprop.cli', 'simulate',
      '--preset', 'fig4-20-er', '--trials', '4',
      '--out', outRoot,
    ],
    { stdio: 'pipe' },
  );
  presetDir = join(outRoot, 'fig4-20-er');
}, 120_000);

describe('figures from a completed preset directory', () => {
  it('renders the convergence figure deterministically', () => {
    const first = renderFigure('convergence', presetDir, true);
    const second = renderFigure('convergence', presetDir, true);
    expect(first).toBe(second);
    expect(first).toContain('<polygon'); // min/max band
    expect(first).toContain('mean MSE');
  });

  it('renders the tail-bound figure deterministically', () => {
    const first = renderFigure('tail-bound', presetDir);
    const second = renderFigure('tail-bound', presetDir);
    expect(first).toBe(second);
    expect(first).toContain('upper bound');
    expect(first).toContain('empirical survival');
  });

  it('keeps the bound above the empirical survival at every round', () => {
    const data = loadPresetDir(presetDir);
    const curve = data.analysis!.bounds!.survival_bound!;
    const empirical = survivalCurve(
      data.aggregate!.t_hat_max_values,
      curve.t[curve.t.length - 1],
    );
    for (let k = 0; k < curve.t.length; k++) {
      expect(empirical[k].y).toBeLessThanOrEqual(curve.p[k] + 1e-12);
    }
  });

  it('writes byte-identical files through the CLI', () => {
    const outA = join(outRoot, 'fig-a.svg');
    const outB = join(outRoot, 'fig-b.svg');
    expect(main(['plot', '--kind', 'convergence', '--in', presetDir, '--out', outA])).toBe(0);
    expect(main(['--kind', 'convergence', '--in', presetDir, '--out', outB])).toBe(0);
    expect(readFileSync(outA, 'utf8')).toBe(readFileSync(outB, 'utf8'));
  });

  it('renders a sweep overlay from variant subdirectories', () => {
    // the preset dir itself is a valid single-variant sweep root
    const svg = renderFigure('sweep', outRoot, true);
    expect(svg).toContain('fig4-20-er');
    writeFileSync(join(outRoot, 'sweep.svg'), svg);
  });
});
