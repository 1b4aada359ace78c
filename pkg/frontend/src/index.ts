/**
 * Node bindings for the monoalign toolkit's hot-path kernels.
 *
 * Matrices cross the boundary as contiguous row-major Float64Arrays plus
 * a shape; float32 callers are up-converted to float64 on the way in and
 * results come back in float64.  Every operation drives the CLI on
 * temporary NPY files, so outputs are bitwise identical to the command
 * line on the same inputs.  Calls are stateless and independent, safe to
 * issue concurrently.
 */

import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { readNpy, writeNpy } from "./npy.js";
import { parseJsonLines, runCli, ShapeError } from "./runner.js";

export { NpyFormatError, readNpy, writeNpy } from "./npy.js";
export {
  MonoalignError,
  NumericError,
  ShapeError,
  runCli,
} from "./runner.js";

export interface Matrix {
  /** row-major values, rows * cols long */
  data: Float64Array;
  rows: number;
  cols: number;
}

export interface ForwardSumResult {
  loss: number;
  grad: Matrix;
}

export interface ViterbiResult {
  path: Int32Array;
  score: number;
}

export interface AlignLossResult {
  total: number;
  forwardSum: number;
  bin: number;
  path: Int32Array;
}

export function matrix(
  data: Float64Array | Float32Array | number[],
  rows: number,
  cols: number,
): Matrix {
  const d = data instanceof Float64Array ? data : Float64Array.from(data);
  if (d.length !== rows * cols) {
    throw new ShapeError(
      `matrix data has ${d.length} values, expected ${rows * cols}`,
      -1,
    );
  }
  return { data: d, rows, cols };
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "monoalign-"));
  try {
    return fn(dir);
  } finally {
    fs.rmSync(dir, { recursive: true, force: true });
  }
}

function writeMatrixFile(dir: string, name: string, m: Matrix): string {
  const file = path.join(dir, name);
  writeNpy(file, m.data, [m.rows, m.cols]);
  return file;
}

function readMatrixFile(file: string): Matrix {
  const arr = readNpy(file);
  const [rows, cols] = arr.shape.length === 2 ? arr.shape : [1, arr.shape[0]];
  return { data: arr.data, rows, cols };
}

/** Forward-sum alignment loss and its gradient for a T x N log-prob matrix. */
export function forwardSum(logProbs: Matrix): ForwardSumResult {
  return withTempDir((dir) => {
    const input = writeMatrixFile(dir, "logprobs.npy", logProbs);
    const gradFile = path.join(dir, "grad.npy");
    const out = runCli(["grad", "--logprobs", input, "-o", gradFile]);
    const result = JSON.parse(out);
    return { loss: result.forward_sum, grad: readMatrixFile(gradFile) };
  });
}

/** Most likely monotonic path and its log-likelihood. */
export function viterbi(logProbs: Matrix): ViterbiResult {
  return withTempDir((dir) => {
    const input = writeMatrixFile(dir, "logprobs.npy", logProbs);
    const result = JSON.parse(runCli(["viterbi", "--logprobs", input]));
    return { path: Int32Array.from(result.path), score: result.score };
  });
}

/** Beta-binomial attention prior; rows sum to 1. */
export function buildPrior(
  nTokens: number,
  nFrames: number,
  omega: number,
): Matrix {
  return withTempDir((dir) => {
    const out = path.join(dir, "prior.npy");
    runCli([
      "prior",
      "--tokens", String(nTokens),
      "--frames", String(nFrames),
      "--omega", String(omega),
      "-o", out,
    ]);
    return readMatrixFile(out);
  });
}

/** Composite parallel-model alignment loss over a row-stochastic matrix. */
export function alignLossParallel(
  soft: Matrix,
  binWeight = 1.0,
): AlignLossResult {
  return withTempDir((dir) => {
    const input = writeMatrixFile(dir, "soft.npy", soft);
    const result = JSON.parse(
      runCli(["loss", "--soft", input, "--bin-weight", String(binWeight)]),
    );
    return {
      total: result.total,
      forwardSum: result.forward_sum,
      bin: result.bin,
      path: Int32Array.from(result.path),
    };
  });
}

/** Batch forward-sum over many matrices in a single CLI invocation. */
export function forwardSumBatch(inputs: Matrix[]): ForwardSumResult[] {
  return withTempDir((dir) => {
    const manifest = path.join(dir, "manifest.txt");
    const outDir = path.join(dir, "grads");
    fs.mkdirSync(outDir);
    const files = inputs.map((m, i) =>
      writeMatrixFile(dir, `in_${String(i).padStart(4, "0")}.npy`, m),
    );
    fs.writeFileSync(manifest, files.join("\n") + "\n");
    const lines = parseJsonLines(
      runCli(["grad", "--list", manifest, "--out-dir", outDir]),
    );
    return lines.map((line) => ({
      loss: line.forward_sum,
      grad: readMatrixFile(line.out),
    }));
  });
}

/** Batch Viterbi over many matrices in a single CLI invocation. */
export function viterbiBatch(inputs: Matrix[]): ViterbiResult[] {
  return withTempDir((dir) => {
    const manifest = path.join(dir, "manifest.txt");
    const files = inputs.map((m, i) =>
      writeMatrixFile(dir, `in_${String(i).padStart(4, "0")}.npy`, m),
    );
    fs.writeFileSync(manifest, files.join("\n") + "\n");
    const lines = parseJsonLines(runCli(["viterbi", "--list", manifest]));
    return lines.map((line) => ({
      path: Int32Array.from(line.path),
      score: line.score,
    }));
  });
}

/** Batch prior construction; one (tokens, frames, omega) triple per entry. */
export function buildPriorBatch(
  configs: Array<{ nTokens: number; nFrames: number; omega: number }>,
): Matrix[] {
  return withTempDir((dir) => {
    const manifest = path.join(dir, "manifest.txt");
    const outDir = path.join(dir, "priors");
    fs.mkdirSync(outDir);
    fs.writeFileSync(
      manifest,
      configs
        .map((c) => `${c.nTokens} ${c.nFrames} ${c.omega}`)
        .join("\n") + "\n",
    );
    const lines = parseJsonLines(
      runCli(["prior", "--list", manifest, "--out-dir", outDir]),
    );
    return lines.map((line) => readMatrixFile(line.out));
  });
}
