/**
 * Source-separation metrics (SDR/SIR/SAR/SI-SDR) for Node.
 *
 * The math runs in the fastsdr evaluator process; this package encodes the
 * sample arrays as lossless float64 WAV files, invokes the CLI, and returns
 * the parsed result document. Double-precision values therefore match the
 * evaluator's own output exactly.
 */

import { mkdtemp, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { DimensionError, runCli } from "./runner.js";
import { encodeWavFloat64 } from "./wav.js";

export {
  CliError,
  DimensionError,
  FileError,
  SolverError,
  ValidationError,
  resolveCli,
  runCli,
} from "./runner.js";
export { decodeWavFloat64, encodeWavFloat64 } from "./wav.js";
export type { WavData } from "./wav.js";

export type Channels = readonly (readonly number[] | Float64Array)[];

export type MetricName = "sdr" | "sir" | "sar";

export interface EvalOptions {
  /** Distortion filter taps L; 1 gives scale-invariant SDR. Default 512. */
  filterLength?: number;
  solver?: "cgd" | "direct" | "levinson";
  /** Conjugate-gradient iteration cap (default 10). */
  iters?: number;
  /** Relative residual target; 0 (default) runs a fixed iteration count. */
  tol?: number;
  precision?: "f64" | "f32";
  metrics?: readonly MetricName[];
  /** Compute the optimal reference/estimate assignment. Default true. */
  resolvePermutation?: boolean;
  clampEpsilon?: number;
  /** FFT worker threads inside the evaluator. */
  threads?: number;
  /** WAV header sample rate; metadata only. Default 16000. */
  sampleRate?: number;
}

export interface AlignedScores {
  sdr: (number | null)[];
  sir: (number | null)[] | null;
  sar: (number | null)[] | null;
}

export interface EvalResults {
  /** sdr[k][m]: reference k against estimate m. Null when not requested. */
  sdr: number[][] | null;
  sir: number[][] | null;
  /** Estimate-wise; independent of the reference index. */
  sar: number[] | null;
  permutation: (number | null)[] | null;
  aligned: AlignedScores | null;
}

export interface EvalDiagnostics {
  solver: string;
  toeplitz_systems: number;
  block_systems: number;
  cgd_iterations: number[];
  final_residuals: number[];
  fallbacks: string[];
  clamp_events: { quantity: string; value: number; indices: number[] }[];
}

export interface EvalDocument {
  config: Record<string, unknown>;
  results: EvalResults;
  diagnostics: EvalDiagnostics;
}

function toChannels(input: Channels, name: string): Float64Array[] {
  if (!Array.isArray(input) || input.length === 0) {
    throw new DimensionError(`${name} must be a non-empty array of channels`);
  }
  const rows = input.map((row, i) => {
    if (typeof row === "number") {
      throw new DimensionError(`${name} must be 2-D (channels x samples), got a flat array`);
    }
    if (!(row instanceof Float64Array) && !Array.isArray(row)) {
      throw new DimensionError(`${name}[${i}] is not a sample array`);
    }
    return row instanceof Float64Array ? row : Float64Array.from(row);
  });
  const length = rows[0]!.length;
  if (length === 0) {
    throw new DimensionError(`${name} channels must not be empty`);
  }
  for (const row of rows) {
    if (row.length !== length) {
      throw new DimensionError(`${name} channels must all have the same length`);
    }
  }
  return rows;
}

function buildFlags(opts: EvalOptions): string[] {
  const flags: string[] = [];
  if (opts.filterLength !== undefined) flags.push("--filter-length", String(opts.filterLength));
  if (opts.solver !== undefined) flags.push("--solver", opts.solver);
  if (opts.iters !== undefined) flags.push("--iters", String(opts.iters));
  if (opts.tol !== undefined) flags.push("--tol", String(opts.tol));
  if (opts.precision !== undefined) flags.push("--precision", opts.precision);
  if (opts.metrics !== undefined) flags.push("--metrics", opts.metrics.join(","));
  if (opts.resolvePermutation === false) flags.push("--no-permutation");
  if (opts.clampEpsilon !== undefined) flags.push("--clamp-epsilon", String(opts.clampEpsilon));
  if (opts.threads !== undefined) flags.push("--threads", String(opts.threads));
  return flags;
}

/**
 * Evaluate SDR/SIR/SAR between reference and estimate channel sets.
 *
 * Both inputs are channels x samples with equal sample counts. The returned
 * document mirrors the evaluator's JSON output: metric matrices indexed
 * [reference][estimate], the resolved permutation, per-match aligned scores,
 * and solver diagnostics.
 */
export async function bssEval(
  references: Channels,
  estimates: Channels,
  options: EvalOptions = {},
): Promise<EvalDocument> {
  const refs = toChannels(references, "references");
  const ests = toChannels(estimates, "estimates");
  const rate = options.sampleRate ?? 16_000;

  const dir = await mkdtemp(join(tmpdir(), "fastsdr-"));
  try {
    const refPath = join(dir, "refs.wav");
    const estPath = join(dir, "ests.wav");
    await writeFile(refPath, encodeWavFloat64(refs, rate));
    await writeFile(estPath, encodeWavFloat64(ests, rate));
    const stdout = await runCli([
      "eval",
      "--refs",
      refPath,
      "--ests",
      estPath,
      ...buildFlags(options),
    ]);
    return JSON.parse(stdout) as EvalDocument;
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

/**
 * Scale-invariant SDR: the single-tap (L = 1) SDR-only evaluation.
 *
 * Pair (k, m) of the returned sdr matrix is the SI-SDR of estimate m
 * against reference k.
 */
export function siSdr(references: Channels, estimates: Channels): Promise<EvalDocument> {
  return bssEval(references, estimates, { filterLength: 1, metrics: ["sdr"] });
}
