/**
 * The JSON checkpoint schema the exporter consumes.
 *
 * This is the hand-off format from the deep-learning side: a feed-forward
 * mapper state dict serialized as plain JSON (nested arrays), e.g. via
 * `{"kind": "affine", "weight": W.tolist(), "bias": b.tolist(), ...}` per
 * layer. Anything that is not a plain affine stack - convolutions,
 * attention, whatever - is rejected by name rather than half-converted.
 */

import { AffineLayer, MapperModel, validateModel, Activation } from './lfmap.js';

const SUPPORTED_KINDS = new Set(['affine', 'linear']);
const SUPPORTED_ACTIVATIONS = new Set<Activation>(['linear', 'relu', 'leaky_relu']);

export function parseCheckpoint(payload: unknown): MapperModel {
  if (typeof payload !== 'object' || payload === null || Array.isArray(payload)) {
    throw new Error('checkpoint must be a JSON object');
  }
  const groupsRaw = (payload as Record<string, unknown>).groups;
  if (!Array.isArray(groupsRaw) || groupsRaw.length === 0) {
    throw new Error('checkpoint needs a non-empty "groups" array');
  }
  const groups = groupsRaw.map((group, gi) => {
    if (typeof group !== 'object' || group === null) {
      throw new Error(`group ${gi} must be an object`);
    }
    const g = group as Record<string, unknown>;
    if (!Array.isArray(g.layers) || !g.layers.every((x) => Number.isInteger(x))) {
      throw new Error(`group ${gi} needs an integer "layers" list`);
    }
    if (!Array.isArray(g.net) || g.net.length === 0) {
      throw new Error(`group ${gi} needs a non-empty "net" list`);
    }
    const net = g.net.map((layer, li) => parseLayer(layer, gi, li));
    return { assigned: g.layers as number[], net };
  });
  const model = { groups };
  validateModel(model);
  return model;
}

function parseLayer(raw: unknown, gi: number, li: number): AffineLayer {
  if (typeof raw !== 'object' || raw === null) {
    throw new Error(`group ${gi} layer ${li} must be an object`);
  }
  const layer = raw as Record<string, unknown>;
  const kind = typeof layer.kind === 'string' ? layer.kind : 'affine';
  if (!SUPPORTED_KINDS.has(kind)) {
    throw new Error(`unsupported layer kind '${kind}' in group ${gi} layer ${li}`);
  }
  const activation = (layer.activation ?? 'linear') as Activation;
  if (!SUPPORTED_ACTIVATIONS.has(activation)) {
    throw new Error(`unsupported activation '${String(layer.activation)}' in group ${gi} layer ${li}`);
  }
  const weightRows = layer.weight;
  if (!Array.isArray(weightRows) || weightRows.length === 0) {
    throw new Error(`group ${gi} layer ${li} needs a 2-D "weight" array`);
  }
  const rows = weightRows.length;
  const first = weightRows[0];
  if (!Array.isArray(first) || first.length === 0) {
    throw new Error(`group ${gi} layer ${li} needs a 2-D "weight" array`);
  }
  const cols = first.length;
  const weight = new Float64Array(rows * cols);
  for (let r = 0; r < rows; r++) {
    const row = weightRows[r];
    if (!Array.isArray(row) || row.length !== cols) {
      throw new Error(`group ${gi} layer ${li} weight row ${r} is ragged`);
    }
    for (let c = 0; c < cols; c++) {
      weight[r * cols + c] = asFinite(row[c], `group ${gi} layer ${li} weight[${r}][${c}]`);
    }
  }
  const biasRaw = layer.bias;
  if (!Array.isArray(biasRaw) || biasRaw.length !== rows) {
    throw new Error(`group ${gi} layer ${li} bias must have ${rows} entries`);
  }
  const bias = Float64Array.from(biasRaw.map((v, i) => asFinite(v, `bias[${i}]`)));
  return { weight, rows, cols, bias, activation };
}

function asFinite(value: unknown, where: string): number {
  if (typeof value !== 'number' || !Number.isFinite(value)) {
    throw new Error(`${where} is not a finite number`);
  }
  return value;
}

/** Nested-array latent source: one (18, 512) code or a batch of them. */
export function parseLatentSource(payload: unknown): { count: number; data: Float64Array } {
  let nested = payload;
  if (typeof nested === 'object' && nested !== null && !Array.isArray(nested)) {
    nested = (nested as Record<string, unknown>).latents;
  }
  if (!Array.isArray(nested) || nested.length === 0) {
    throw new Error('latent source must be a non-empty array (or {"latents": ...})');
  }
  const batch = Array.isArray((nested as unknown[])[0]) && Array.isArray(((nested as unknown[])[0] as unknown[])[0])
    ? (nested as unknown[])
    : [nested];
  const count = batch.length;
  const data = new Float64Array(count * 18 * 512);
  for (let n = 0; n < count; n++) {
    const code = batch[n];
    if (!Array.isArray(code) || code.length !== 18) {
      throw new Error(`latent ${n} must have 18 layers, got ${Array.isArray(code) ? code.length : typeof code}`);
    }
    for (let i = 0; i < 18; i++) {
      const row = code[i];
      if (!Array.isArray(row) || row.length !== 512) {
        throw new Error(
          `latent ${n} layer ${i} must have 512 channels, got ${Array.isArray(row) ? row.length : typeof row}`,
        );
      }
      for (let j = 0; j < 512; j++) {
        data[(n * 18 + i) * 512 + j] = asFinite(row[j], `latent ${n} [${i}][${j}]`);
      }
    }
  }
  return { count, data };
}
