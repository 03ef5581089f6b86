/** Checkpoint builders shared by the unit and integration suites. */

import { makeRng } from '../src/prng.js';

export function identityCheckpoint(layers: number[] = [4, 5, 6, 7]) {
  const weight: number[][] = [];
  for (let r = 0; r < 512; r++) {
    const row = new Array<number>(512).fill(0);
    row[r] = 1;
    weight.push(row);
  }
  return {
    format: 'wplus-mapper-checkpoint',
    groups: [
      { layers, net: [{ kind: 'affine', activation: 'linear', weight, bias: new Array(512).fill(0) }] },
    ],
  };
}

export function twoLayerCheckpoint(seed = 3, layers: number[] = [0, 1, 2, 3], hidden = 8) {
  const rng = makeRng(seed);
  const mat = (rows: number, cols: number) => {
    const out: number[][] = [];
    for (let r = 0; r < rows; r++) {
      const row: number[] = [];
      for (let c = 0; c < cols; c++) row.push((rng() - 0.5) / Math.sqrt(cols));
      out.push(row);
    }
    return out;
  };
  const vec = (n: number) => {
    const out: number[] = [];
    for (let i = 0; i < n; i++) out.push((rng() - 0.5) * 0.1);
    return out;
  };
  return {
    format: 'wplus-mapper-checkpoint',
    groups: [
      {
        layers,
        net: [
          { kind: 'affine', activation: 'leaky_relu', weight: mat(hidden, 512), bias: vec(hidden) },
          { kind: 'affine', activation: 'linear', weight: mat(512, hidden), bias: vec(512) },
        ],
      },
    ],
  };
}
