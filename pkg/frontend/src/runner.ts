/**
 * Subprocess bridge to the monoalign CLI.
 *
 * The bindings never re-implement any numerics: every call shells out to
 * the same kernels the CLI exposes, exchanging matrices as NPY files and
 * scalars as JSON on stdout, so results agree with the CLI to the bit.
 */

import { spawnSync } from "node:child_process";

/** CLI exit codes, mirrored from the toolkit. */
export const EXIT_USAGE = 1;
export const EXIT_DATA = 2;
export const EXIT_NUMERIC = 3;

export class MonoalignError extends Error {
  constructor(
    message: string,
    public readonly exitCode: number,
  ) {
    super(message);
  }
}

/** Input is malformed: bad shapes, bad values, bad files. */
export class ShapeError extends MonoalignError {}

/** Input is fine but the requested quantity does not exist. */
export class NumericError extends MonoalignError {}

function defaultCommand(): string[] {
  const env = process.env.MONOALIGN_CLI;
  if (env && env.trim().length > 0) {
    return env.trim().split(/\s+/);
  }
  return ["python3", "-m", "monoalign"];
}

/** Run a CLI subcommand; returns stdout. Throws typed errors on failure. */
export function runCli(args: string[], command?: string[]): string {
  const cmd = command ?? defaultCommand();
  const result = spawnSync(cmd[0], [...cmd.slice(1), ...args], {
    encoding: "utf8",
    maxBuffer: 256 * 1024 * 1024,
  });
  if (result.error) {
    throw new MonoalignError(
      `failed to launch ${cmd[0]}: ${result.error.message}`,
      -1,
    );
  }
  if (result.status === 0) {
    return result.stdout;
  }
  const message = (result.stderr ?? "").trim() || `exit code ${result.status}`;
  switch (result.status) {
    case EXIT_DATA:
      throw new ShapeError(message, EXIT_DATA);
    case EXIT_NUMERIC:
      throw new NumericError(message, EXIT_NUMERIC);
    default:
      throw new MonoalignError(message, result.status ?? -1);
  }
}

/** Parse newline-delimited JSON emitted by batch (--list) subcommands. */
export function parseJsonLines(stdout: string): any[] {
  return stdout
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line));
}
