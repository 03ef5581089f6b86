/**
 * Reference forward pass, kept as straight-line arithmetic on purpose: the
 * recorded outputs are the binding contract the Python toolkit must match,
 * so this implementation stays independent of it.
 */

import { LATENT_CHANNELS, LATENT_LAYERS, MapperModel } from './lfmap.js';

const LEAKY_SLOPE = 0.2;

/** input and output are (18, 512) row-major; unassigned rows map to zero. */
export function mapperForward(model: MapperModel, input: Float64Array): Float64Array {
  if (input.length !== LATENT_LAYERS * LATENT_CHANNELS) {
    throw new Error(`input must have ${LATENT_LAYERS * LATENT_CHANNELS} values`);
  }
  const out = new Float64Array(LATENT_LAYERS * LATENT_CHANNELS);
  for (const group of model.groups) {
    for (const rowIndex of group.assigned) {
      let x = input.subarray(rowIndex * LATENT_CHANNELS, (rowIndex + 1) * LATENT_CHANNELS);
      for (const layer of group.net) {
        const y = new Float64Array(layer.rows);
        for (let r = 0; r < layer.rows; r++) {
          let acc = layer.bias[r];
          const base = r * layer.cols;
          for (let c = 0; c < layer.cols; c++) {
            acc += layer.weight[base + c] * x[c];
          }
          y[r] = applyActivation(layer.activation, acc);
        }
        x = y;
      }
      out.set(x, rowIndex * LATENT_CHANNELS);
    }
  }
  return out;
}

function applyActivation(name: string, v: number): number {
  if (name === 'relu') return v > 0 ? v : 0;
  if (name === 'leaky_relu') return v >= 0 ? v : LEAKY_SLOPE * v;
  return v;
}
