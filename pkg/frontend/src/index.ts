export { parseTrialCsv, TrialSeries } from './csv.js';
export { loadPresetDir, listVariantDirs, PresetData } from './data.js';
export { meanAcross, errorBand, survivalCurve, Point } from './series.js';
export { renderChart, Channel, ChartSpec, PALETTE } from './svg.js';
export {
  renderFigure,
  renderConvergence,
  renderSweep,
  renderTailBound,
  FigureKind,
} from './plot.js';
