/** Loading of one experiment output directory (trial CSVs + JSON files). */

import { readdirSync, readFileSync, existsSync } from 'fs';
import { join } from 'path';

import { TrialSeries, parseTrialCsv } from './csv.js';

export interface AggregateFile {
  preset: string;
  n_trials: number;
  t_hat_max_values: (number | null)[];
  t_f_values: (number | null)[];
}

export interface BoundCurve {
  t: number[];
  p: number[];
}

export interface AnalysisFile {
  bounds?: {
    delta?: number | string;
    survival_bound?: BoundCurve;
    error?: string;
  };
}

export interface PresetData {
  dir: string;
  trials: TrialSeries[];
  aggregate: AggregateFile | null;
  analysis: AnalysisFile | null;
}

export function loadPresetDir(dir: string): PresetData {
  let entries: string[];
  try {
    entries = readdirSync(dir);
  } catch {
    throw new Error(`cannot read experiment directory ${dir}`);
  }
  const trialFiles = entries
    .map((name) => /^trial_(\d+)\.csv$/.exec(name))
    .filter((m): m is RegExpExecArray => m !== null)
    .sort((a, b) => Number(a[1]) - Number(b[1]));
  if (trialFiles.length === 0) {
    throw new Error(`${dir}: no trial_<k>.csv files found`);
  }
  const trials = trialFiles.map((m) =>
    parseTrialCsv(readFileSync(join(dir, m[0]), 'utf8'), m[0]),
  );
  return {
    dir,
    trials,
    aggregate: readJson<AggregateFile>(join(dir, 'aggregate.json')),
    analysis: readJson<AnalysisFile>(join(dir, 'analysis.json')),
  };
}

export function listVariantDirs(dir: string): string[] {
  const out: string[] = [];
  for (const name of readdirSync(dir).sort()) {
    const sub = join(dir, name);
    if (existsSync(join(sub, 'trial_0.csv'))) {
      out.push(sub);
    }
  }
  if (out.length === 0) {
    throw new Error(`${dir}: no variant subdirectories with trial_0.csv`);
  }
  return out;
}

function readJson<T>(path: string): T | null {
  if (!existsSync(path)) return null;
  return JSON.parse(readFileSync(path, 'utf8')) as T;
}
