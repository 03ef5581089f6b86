/**
 * Minimal NPY v1.0 writer/reader for latent archives.
 *
 * Emits the exact canonical byte layout the Python toolkit (and numpy's
 * np.save) produces: magic \x93NUMPY, version 1.0, little-endian u16 header
 * length, a space-padded single-line header dictionary terminated by a
 * newline, total header size a multiple of 64, then the raw C-order
 * little-endian payload. Only '<f4' / '<f8' and C-order are supported.
 */

export type DtypeTag = 'f32' | 'f64';

export interface NpyArray {
  shape: number[];
  dtype: DtypeTag;
  /** Values widened to f64 regardless of the on-disk width. */
  data: Float64Array;
}

const MAGIC = Buffer.from('\x93NUMPY', 'latin1');
const HEADER_ALIGN = 64;
const DESCR: Record<DtypeTag, string> = { f32: '<f4', f64: '<f8' };

function product(shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1);
}

export function writeNpy(data: Float64Array, shape: number[], dtype: DtypeTag = 'f64'): Buffer {
  if (product(shape) !== data.length) {
    throw new Error(`shape ${JSON.stringify(shape)} does not match ${data.length} values`);
  }
  const dict = `{'descr': '${DESCR[dtype]}', 'fortran_order': False, 'shape': (${shape.join(', ')}), }`;
  const unpadded = 10 + dict.length + 1;
  const padding = (HEADER_ALIGN - (unpadded % HEADER_ALIGN)) % HEADER_ALIGN;
  const headerText = dict + ' '.repeat(padding) + '\n';

  const header = Buffer.alloc(10 + headerText.length);
  MAGIC.copy(header, 0);
  header[6] = 1;
  header[7] = 0;
  header.writeUInt16LE(headerText.length, 8);
  header.write(headerText, 10, 'latin1');

  let payload: Buffer;
  if (dtype === 'f64') {
    payload = Buffer.from(data.buffer.slice(data.byteOffset, data.byteOffset + data.byteLength));
  } else {
    const narrowed = Float32Array.from(data);
    for (let i = 0; i < narrowed.length; i++) {
      if (!Number.isFinite(narrowed[i])) {
        throw new Error(`narrowing overflow: value ${data[i]} exceeds the float32 range`);
      }
    }
    payload = Buffer.from(narrowed.buffer);
  }
  return Buffer.concat([header, payload]);
}

export function readNpy(buf: Buffer): NpyArray {
  if (buf.length < 6 || !buf.subarray(0, 6).equals(MAGIC)) {
    throw new Error('not an NPY file: bad magic bytes');
  }
  if (buf.length < 10) throw new Error('payload length mismatch: header truncated');
  if (buf[6] !== 1 || buf[7] !== 0) {
    throw new Error(`unsupported layout: npy version ${buf[6]}.${buf[7]}`);
  }
  const headerLen = buf.readUInt16LE(8);
  const offset = 10 + headerLen;
  if (offset > buf.length) throw new Error('payload length mismatch: header truncated');
  const text = buf.subarray(10, offset).toString('latin1');

  const descr = match(text, /'descr':\s*'([^']+)'/, 'descr');
  const fortran = match(text, /'fortran_order':\s*(True|False)/, 'fortran_order');
  const shapeText = match(text, /'shape':\s*\(([^)]*)\)/, 'shape');
  if (fortran !== 'False') throw new Error('unsupported layout: fortran_order must be False');
  let dtype: DtypeTag;
  if (descr === '<f8') dtype = 'f64';
  else if (descr === '<f4') dtype = 'f32';
  else throw new Error(`unsupported layout: dtype '${descr}'`);

  const shape = shapeText
    .split(',')
    .map((s) => s.trim())
    .filter((s) => s.length > 0)
    .map((s) => {
      if (!/^\d+$/.test(s)) throw new Error(`unsupported layout: bad shape entry '${s}'`);
      return parseInt(s, 10);
    });

  const itemSize = dtype === 'f64' ? 8 : 4;
  const expected = product(shape) * itemSize;
  const payload = buf.subarray(offset);
  if (payload.length !== expected) {
    throw new Error(`payload length mismatch: expected ${expected} bytes, got ${payload.length}`);
  }
  // copy into a fresh ArrayBuffer: Buffer views from the pool may be unaligned
  const aligned = new ArrayBuffer(expected);
  new Uint8Array(aligned).set(payload);
  const data =
    dtype === 'f64'
      ? new Float64Array(aligned)
      : Float64Array.from(new Float32Array(aligned));
  return { shape, dtype, data };
}

function match(text: string, re: RegExp, field: string): string {
  const m = re.exec(text);
  if (!m) throw new Error(`unsupported layout: header field ${field} missing`);
  return m[1];
}
