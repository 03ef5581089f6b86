/**
 * Exporter CLI.
 *
 * Usage:
 *   latentedit-export latents <source.json> <out-dir> [--dtype f32|f64]
 *   latentedit-export mapper <checkpoint.json> <out-dir> [--seed N]
 *
 * `latents` converts a JSON latent archive (nested (N, 18, 512) arrays, or
 * a single (18, 512) code) into latents.npy plus manifest.json.
 * `mapper` converts a feed-forward JSON checkpoint into mapper.lfmap plus a
 * recorded (reference_input.npy, reference_output.npy) pair and
 * manifest.json; the consuming toolkit must reproduce the reference output
 * within 1e-5 relative.
 *
 * Exit codes: 0 success, 1 conversion error, 2 usage error.
 */

import { mkdirSync, readFileSync, writeFileSync } from 'node:fs';
import { join } from 'node:path';

import { exportLatents, exportMapper, writeMapperExport } from './exporter.js';
import { DtypeTag } from './npy.js';

const USAGE = [
  'usage:',
  '  latentedit-export latents <source.json> <out-dir> [--dtype f32|f64]',
  '  latentedit-export mapper <checkpoint.json> <out-dir> [--seed N]',
].join('\n');

class UsageError extends Error {}

function parseArgs(argv: string[]) {
  const [command, source, outDir, ...rest] = argv;
  if (!command || !source || !outDir) throw new UsageError(USAGE);
  if (command !== 'latents' && command !== 'mapper') throw new UsageError(USAGE);
  let dtype: DtypeTag = 'f32';
  let seed = 1;
  for (let i = 0; i < rest.length; i++) {
    if (rest[i] === '--dtype') {
      const value = rest[++i];
      if (value !== 'f32' && value !== 'f64') throw new UsageError(USAGE);
      dtype = value;
    } else if (rest[i] === '--seed') {
      seed = parseInt(rest[++i] ?? '', 10);
      if (!Number.isInteger(seed)) throw new UsageError(USAGE);
    } else {
      throw new UsageError(USAGE);
    }
  }
  return { command, source, outDir, dtype, seed };
}

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 2;
  }
  try {
    const text = readFileSync(args.source, 'utf8');
    if (args.command === 'latents') {
      const result = exportLatents(text, args.source, args.dtype);
      mkdirSync(args.outDir, { recursive: true });
      writeFileSync(join(args.outDir, 'latents.npy'), result.npyBytes);
      writeFileSync(
        join(args.outDir, 'manifest.json'),
        JSON.stringify(result.manifest, null, 2) + '\n',
      );
      console.log(`exported ${result.count} latent codes (${args.dtype}) to ${args.outDir}`);
    } else {
      const result = exportMapper(text, args.source, args.seed);
      writeMapperExport(result, args.outDir);
      console.log(`exported mapper + reference pair (seed ${args.seed}) to ${args.outDir}`);
    }
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith('cli.js')) {
  process.exit(main(process.argv.slice(2)));
}
