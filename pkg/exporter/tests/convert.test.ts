import { describe, expect, it } from 'vitest';

import { parseCheckpoint, parseLatentSource } from '../src/checkpoint.js';
import { exportLatents, exportMapper } from '../src/exporter.js';
import { mapperForward } from '../src/forward.js';
import { decodeMapper, encodeMapper } from '../src/lfmap.js';
import { readNpy } from '../src/npy.js';
import { standardNormals } from '../src/prng.js';
import { identityCheckpoint, twoLayerCheckpoint } from './fixtures.js';

describe('checkpoint parsing', () => {
  it('accepts an identity checkpoint and encodes a loadable weight file', () => {
    const model = parseCheckpoint(identityCheckpoint());
    const decoded = decodeMapper(encodeMapper(model));
    expect(decoded.groups[0].assigned).toEqual([4, 5, 6, 7]);
    expect(decoded.groups[0].net[0].activation).toBe('linear');
  });

  it('identity forward copies assigned rows and zeroes the rest', () => {
    const model = parseCheckpoint(identityCheckpoint([2]));
    const input = standardNormals(18 * 512, 5);
    const output = mapperForward(model, input);
    for (let j = 0; j < 512; j++) {
      expect(output[2 * 512 + j]).toBe(input[2 * 512 + j]);
      expect(output[3 * 512 + j]).toBe(0);
    }
  });

  it('rejects a convolution by name', () => {
    const ckpt = identityCheckpoint() as any;
    ckpt.groups[0].net[0].kind = 'conv2d';
    expect(() => parseCheckpoint(ckpt)).toThrow(/unsupported layer kind 'conv2d'/);
  });

  it('rejects unknown activations', () => {
    const ckpt = identityCheckpoint() as any;
    ckpt.groups[0].net[0].activation = 'gelu';
    expect(() => parseCheckpoint(ckpt)).toThrow(/unsupported activation/);
  });

  it('rejects ragged weights', () => {
    const ckpt = identityCheckpoint() as any;
    ckpt.groups[0].net[0].weight[3] = [1, 2, 3];
    expect(() => parseCheckpoint(ckpt)).toThrow(/ragged/);
  });

  it('rejects chains that do not map 512 -> 512', () => {
    const ckpt = twoLayerCheckpoint() as any;
    ckpt.groups[0].net[1].weight = ckpt.groups[0].net[1].weight.slice(0, 100);
    ckpt.groups[0].net[1].bias = ckpt.groups[0].net[1].bias.slice(0, 100);
    expect(() => parseCheckpoint(ckpt)).toThrow(/dimension mismatch/);
  });

  it('rejects overlapping group assignments', () => {
    const ckpt = {
      groups: [identityCheckpoint([0, 1]).groups[0], identityCheckpoint([1, 2]).groups[0]],
    };
    expect(() => parseCheckpoint(ckpt)).toThrow(/assigned twice/);
  });
});

describe('latent source parsing', () => {
  const code = () => Array.from({ length: 18 }, () => new Array<number>(512).fill(0.5));

  it('accepts a batch and a single code', () => {
    expect(parseLatentSource([code(), code()]).count).toBe(2);
    expect(parseLatentSource(code()).count).toBe(1);
    expect(parseLatentSource({ latents: [code()] }).count).toBe(1);
  });

  it('rejects a (18, 510) source', () => {
    const bad = Array.from({ length: 18 }, () => new Array<number>(510).fill(0));
    expect(() => parseLatentSource(bad)).toThrow(/512 channels/);
  });

  it('rejects wrong layer counts and non-finite entries', () => {
    expect(() => parseLatentSource(Array.from({ length: 17 }, () => new Array(512).fill(0)))).toThrow(
      /18 layers/,
    );
    const nan = code() as any;
    nan[0][0] = null;
    expect(() => parseLatentSource(nan)).toThrow(/not a finite number/);
  });
});

describe('export results', () => {
  it('latent export emits a parseable archive and a hashed manifest', () => {
    const source = JSON.stringify([Array.from({ length: 18 }, () => new Array(512).fill(0))]);
    const result = exportLatents(source, 'mem.json', 'f64');
    const parsed = readNpy(result.npyBytes);
    expect(parsed.shape).toEqual([1, 18, 512]);
    expect(parsed.data.every((v) => v === 0)).toBe(true);
    expect(result.manifest.files[0].sha256).toMatch(/^[0-9a-f]{64}$/);
    expect(result.manifest.files[0].name).toBe('latents.npy');
  });

  it('mapper export records a reference pair that its own forward reproduces', () => {
    const result = exportMapper(JSON.stringify(twoLayerCheckpoint()), 'ckpt.json', 11);
    const model = decodeMapper(result.mapperBytes);
    const replay = mapperForward(model, result.referenceInput);
    for (let i = 0; i < replay.length; i++) {
      expect(replay[i]).toBe(result.referenceOutput[i]);
    }
    expect(result.manifest.reference?.tolerance_relative).toBe(1e-5);
    expect(result.manifest.files.map((f) => f.name)).toEqual([
      'mapper.lfmap',
      'reference_input.npy',
      'reference_output.npy',
    ]);
  });

  it('reference inputs are deterministic per seed', () => {
    const a = exportMapper(JSON.stringify(identityCheckpoint()), 'x', 4);
    const b = exportMapper(JSON.stringify(identityCheckpoint()), 'x', 4);
    expect(Array.from(a.referenceInput)).toEqual(Array.from(b.referenceInput));
    expect(a.mapperBytes.equals(b.mapperBytes)).toBe(true);
  });
});
