/**
 * Conversion entry points plus the manifest that binds the outputs together.
 *
 * Every emitted file is listed in the manifest with its content hash, and a
 * mapper export records a (reference input, reference output) pair computed
 * here at conversion time; the consuming toolkit must reproduce the output
 * within the stated relative tolerance for the export to be considered
 * valid.
 */

import { createHash } from 'node:crypto';
import { mkdirSync, writeFileSync } from 'node:fs';
import { join } from 'node:path';

import { parseCheckpoint, parseLatentSource } from './checkpoint.js';
import { mapperForward } from './forward.js';
import { encodeMapper, LATENT_CHANNELS, LATENT_LAYERS } from './lfmap.js';
import { DtypeTag, writeNpy } from './npy.js';
import { standardNormals } from './prng.js';

export const REFERENCE_TOLERANCE_RELATIVE = 1e-5;

export interface ManifestFile {
  name: string;
  sha256: string;
  bytes: number;
  shape?: number[];
  dtype?: string;
}

export interface ExportManifest {
  source: { path: string; sha256: string };
  files: ManifestFile[];
  reference?: {
    input: string;
    output: string;
    seed: number;
    tolerance_relative: number;
  };
}

export function sha256(data: Buffer): string {
  return createHash('sha256').update(data).digest('hex');
}

function manifestFile(name: string, data: Buffer, extra?: Partial<ManifestFile>): ManifestFile {
  return { name, sha256: sha256(data), bytes: data.length, ...extra };
}

export interface LatentExportResult {
  npyBytes: Buffer;
  count: number;
  manifest: ExportManifest;
}

export function exportLatents(
  sourceJson: string,
  sourcePath: string,
  dtype: DtypeTag = 'f32',
): LatentExportResult {
  const { count, data } = parseLatentSource(JSON.parse(sourceJson));
  const npyBytes = writeNpy(data, [count, LATENT_LAYERS, LATENT_CHANNELS], dtype);
  const manifest: ExportManifest = {
    source: { path: sourcePath, sha256: sha256(Buffer.from(sourceJson)) },
    files: [
      manifestFile('latents.npy', npyBytes, {
        shape: [count, LATENT_LAYERS, LATENT_CHANNELS],
        dtype,
      }),
    ],
  };
  return { npyBytes, count, manifest };
}

export interface MapperExportResult {
  mapperBytes: Buffer;
  referenceInput: Float64Array;
  referenceOutput: Float64Array;
  manifest: ExportManifest;
}

export function exportMapper(
  checkpointJson: string,
  sourcePath: string,
  referenceSeed = 1,
): MapperExportResult {
  const model = parseCheckpoint(JSON.parse(checkpointJson));
  const mapperBytes = encodeMapper(model);
  const referenceInput = standardNormals(LATENT_LAYERS * LATENT_CHANNELS, referenceSeed);
  const referenceOutput = mapperForward(model, referenceInput);

  const shape = [1, LATENT_LAYERS, LATENT_CHANNELS];
  const inputNpy = writeNpy(referenceInput, shape, 'f64');
  const outputNpy = writeNpy(referenceOutput, shape, 'f64');
  const manifest: ExportManifest = {
    source: { path: sourcePath, sha256: sha256(Buffer.from(checkpointJson)) },
    files: [
      manifestFile('mapper.lfmap', mapperBytes),
      manifestFile('reference_input.npy', inputNpy, { shape, dtype: 'f64' }),
      manifestFile('reference_output.npy', outputNpy, { shape, dtype: 'f64' }),
    ],
    reference: {
      input: 'reference_input.npy',
      output: 'reference_output.npy',
      seed: referenceSeed,
      tolerance_relative: REFERENCE_TOLERANCE_RELATIVE,
    },
  };
  return { mapperBytes, referenceInput, referenceOutput, manifest };
}

export function writeMapperExport(result: MapperExportResult, outDir: string): void {
  mkdirSync(outDir, { recursive: true });
  const shape = [1, LATENT_LAYERS, LATENT_CHANNELS];
  writeFileSync(join(outDir, 'mapper.lfmap'), result.mapperBytes);
  writeFileSync(join(outDir, 'reference_input.npy'), writeNpy(result.referenceInput, shape, 'f64'));
  writeFileSync(join(outDir, 'reference_output.npy'), writeNpy(result.referenceOutput, shape, 'f64'));
  writeFileSync(join(outDir, 'manifest.json'), JSON.stringify(result.manifest, null, 2) + '\n');
}
