/** Parsing of the simulator's per-trial metric CSVs. */

export interface TrialSeries {
  round: number[];
  mse: number[];
  maxErr: number[];
  minErr: number[];
}

const COLUMNS = ['round', 'mse', 'max_err', 'min_err'] as const;

export function parseTrialCsv(text: string, source = 'trial.csv'): TrialSeries {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length < 2) {
    throw new Error(`${source}: no data rows`);
  }
  const header = lines[0].split(',').map((h) => h.trim());
  const indices: number[] = [];
  for (const column of COLUMNS) {
    const idx = header.indexOf(column);
    if (idx < 0) {
      throw new Error(`${source}: missing column "${column}"`);
    }
    indices.push(idx);
  }
  const series: TrialSeries = { round: [], mse: [], maxErr: [], minErr: [] };
  for (let row = 1; row < lines.length; row++) {
    if (!lines[row].trim()) continue;
    const cells = lines[row].split(',');
    const values = indices.map((idx, k) => {
      const v = Number(cells[idx]);
      if (!Number.isFinite(v)) {
        throw new Error(
          `${source}: row ${row} column "${COLUMNS[k]}" is not a number`,
        );
      }
      return v;
    });
    series.round.push(values[0]);
    series.mse.push(values[1]);
    series.maxErr.push(values[2]);
    series.minErr.push(values[3]);
  }
  return series;
}
