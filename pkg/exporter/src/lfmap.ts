/**
 * LFMAP1 mapper weight-file encoder (and a decoder for self-checks).
 *
 * Layout, all integers little-endian: magic "LFMAP1", u32 group count,
 * then per group: u32 assigned count, assigned layer indices as u32,
 * u32 layer count, and per affine layer u32 rows, u32 cols, u8 activation
 * tag (0 linear, 1 relu, 2 leaky-relu 0.2), rows*cols f64 row-major
 * weights, rows f64 bias. A layer computes act(W @ x + b).
 */

export type Activation = 'linear' | 'relu' | 'leaky_relu';

export interface AffineLayer {
  /** rows x cols, row-major; rows = output dim, cols = input dim. */
  weight: Float64Array;
  rows: number;
  cols: number;
  bias: Float64Array;
  activation: Activation;
}

export interface MapperGroup {
  assigned: number[];
  net: AffineLayer[];
}

export interface MapperModel {
  groups: MapperGroup[];
}

export const LATENT_LAYERS = 18;
export const LATENT_CHANNELS = 512;

const MAGIC = Buffer.from('LFMAP1', 'latin1');
const TAG: Record<Activation, number> = { linear: 0, relu: 1, leaky_relu: 2 };
const ACTIVATION_BY_TAG: Activation[] = ['linear', 'relu', 'leaky_relu'];

export function validateModel(model: MapperModel): void {
  if (model.groups.length < 1 || model.groups.length > 3) {
    throw new Error(`mapper must have 1..3 groups, got ${model.groups.length}`);
  }
  const seen = new Set<number>();
  for (const group of model.groups) {
    for (const layer of group.assigned) {
      if (!Number.isInteger(layer) || layer < 0 || layer >= LATENT_LAYERS) {
        throw new Error(`assigned layer ${layer} out of range 0..${LATENT_LAYERS - 1}`);
      }
      if (seen.has(layer)) throw new Error(`latent layer ${layer} assigned twice`);
      seen.add(layer);
    }
    if (group.net.length === 0) throw new Error('a group needs at least one affine layer');
    if (group.net[0].cols !== LATENT_CHANNELS || group.net[group.net.length - 1].rows !== LATENT_CHANNELS) {
      throw new Error(
        `dimension mismatch: chain must map ${LATENT_CHANNELS} -> ${LATENT_CHANNELS}`,
      );
    }
    for (let i = 0; i < group.net.length; i++) {
      const layer = group.net[i];
      if (layer.weight.length !== layer.rows * layer.cols) {
        throw new Error(`dimension mismatch: weight has ${layer.weight.length} values`);
      }
      if (layer.bias.length !== layer.rows) {
        throw new Error(`dimension mismatch: bias length ${layer.bias.length} != ${layer.rows}`);
      }
      if (i > 0 && layer.cols !== group.net[i - 1].rows) {
        throw new Error(
          `dimension mismatch: layer expects ${layer.cols} inputs, previous yields ${group.net[i - 1].rows}`,
        );
      }
      for (const v of layer.weight) {
        if (!Number.isFinite(v)) throw new Error('mapper weights must be finite');
      }
      for (const v of layer.bias) {
        if (!Number.isFinite(v)) throw new Error('mapper weights must be finite');
      }
    }
  }
}

export function encodeMapper(model: MapperModel): Buffer {
  validateModel(model);
  const chunks: Buffer[] = [MAGIC, u32(model.groups.length)];
  for (const group of model.groups) {
    chunks.push(u32(group.assigned.length));
    for (const layer of group.assigned) chunks.push(u32(layer));
    chunks.push(u32(group.net.length));
    for (const layer of group.net) {
      const head = Buffer.alloc(9);
      head.writeUInt32LE(layer.rows, 0);
      head.writeUInt32LE(layer.cols, 4);
      head[8] = TAG[layer.activation];
      chunks.push(head, f64s(layer.weight), f64s(layer.bias));
    }
  }
  return Buffer.concat(chunks);
}

export function decodeMapper(buf: Buffer): MapperModel {
  let pos = 0;
  const take = (n: number): Buffer => {
    if (pos + n > buf.length) throw new Error('truncated mapper file');
    const out = buf.subarray(pos, pos + n);
    pos += n;
    return out;
  };
  const readU32 = () => take(4).readUInt32LE(0);

  if (!take(6).equals(MAGIC)) throw new Error('not a mapper weight file: bad magic');
  const groupCount = readU32();
  if (groupCount < 1 || groupCount > 3) throw new Error(`mapper must have 1..3 groups, got ${groupCount}`);
  const groups: MapperGroup[] = [];
  for (let g = 0; g < groupCount; g++) {
    const assignedCount = readU32();
    if (assignedCount > LATENT_LAYERS) throw new Error(`group claims ${assignedCount} layers`);
    const assigned: number[] = [];
    for (let i = 0; i < assignedCount; i++) assigned.push(readU32());
    const layerCount = readU32();
    if (layerCount === 0 || layerCount > 64) throw new Error(`implausible layer count ${layerCount}`);
    const net: AffineLayer[] = [];
    for (let i = 0; i < layerCount; i++) {
      const rows = readU32();
      const cols = readU32();
      const tag = take(1)[0];
      const activation = ACTIVATION_BY_TAG[tag];
      if (activation === undefined) throw new Error(`unknown activation tag ${tag}`);
      const weight = toF64(take(8 * rows * cols));
      const bias = toF64(take(8 * rows));
      net.push({ weight, rows, cols, bias, activation });
    }
    groups.push({ assigned, net });
  }
  if (pos !== buf.length) throw new Error(`${buf.length - pos} trailing bytes after mapper data`);
  const model = { groups };
  validateModel(model);
  return model;
}

function u32(value: number): Buffer {
  const buf = Buffer.alloc(4);
  buf.writeUInt32LE(value, 0);
  return buf;
}

function f64s(values: Float64Array): Buffer {
  const buf = Buffer.alloc(8 * values.length);
  for (let i = 0; i < values.length; i++) buf.writeDoubleLE(values[i], 8 * i);
  return buf;
}

function toF64(raw: Buffer): Float64Array {
  const out = new Float64Array(raw.length / 8);
  for (let i = 0; i < out.length; i++) out[i] = raw.readDoubleLE(8 * i);
  return out;
}
