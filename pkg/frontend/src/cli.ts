#!/usr/bin/env node
/** CLI: plot --kind <convergence|sweep|tail-bound> --in DIR --out FILE.svg [--log] */

import { writeFileSync } from 'fs';

import { FigureKind, renderFigure } from './plot.js';

const USAGE =
  'usage: trustprop-plot --kind <convergence|sweep|tail-bound> --in DIR --out FILE.svg [--log]';

export function main(argv: string[]): number {
  const args = [...argv];
  if (args[0] === 'plot') args.shift();
  let kind: string | undefined;
  let inDir: string | undefined;
  let outFile: string | undefined;
  let logY = false;
  while (args.length) {
    const flag = args.shift();
    switch (flag) {
      case '--kind':
        kind = args.shift();
        break;
      case '--in':
        inDir = args.shift();
        break;
      case '--out':
        outFile = args.shift();
        break;
      case '--log':
        logY = true;
        break;
      case '--help':
      case '-h':
        console.log(USAGE);
        return 0;
      default:
        console.error(`unknown argument "${flag}"\n${USAGE}`);
        return 2;
    }
  }
  if (!kind || !inDir || !outFile) {
    console.error(USAGE);
    return 2;
  }
  if (!['convergence', 'sweep', 'tail-bound'].includes(kind)) {
    console.error(`unknown figure kind "${kind}"\n${USAGE}`);
    return 2;
  }
  if (!outFile.endsWith('.svg')) {
    console.error('only .svg output is supported; pass a path ending in .svg');
    return 2;
  }
  try {
    const svg = renderFigure(kind as FigureKind, inDir, logY);
    writeFileSync(outFile, svg);
    console.log(`wrote ${outFile}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
