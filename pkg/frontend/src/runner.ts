/**
 * Process plumbing: locate and invoke the evaluator CLI.
 *
 * Every computation happens inside the spawned process; this layer only
 * moves bytes. Nonzero exits carry a single JSON object on stderr, which is
 * surfaced as a typed error with the original message preserved.
 */

import { execFile } from "node:child_process";

/** Raised before spawning when the input arrays are not channels x samples. */
export class DimensionError extends Error {}

/** Base class for failures reported by the evaluator process. */
export class CliError extends Error {
  constructor(
    message: string,
    /** Process exit code (2 file, 3 validation, 4 solver). */
    public readonly exitCode: number,
    /** Error class name reported by the evaluator, e.g. "LengthMismatchError". */
    public readonly errorType: string,
  ) {
    super(message);
  }
}

/** Exit code 2: unreadable, missing, or malformed input files. */
export class FileError extends CliError {}

/** Exit code 3: inputs or options rejected by validation. */
export class ValidationError extends CliError {}

/** Exit code 4: every solver in the fallback chain failed. */
export class SolverError extends CliError {}

const ERROR_BY_CODE: Record<number, typeof CliError> = {
  2: FileError,
  3: ValidationError,
  4: SolverError,
};

/**
 * Command that starts the evaluator. Override with the FASTSDR_CLI
 * environment variable (whitespace-separated argv prefix); defaults to the
 * installed Python module.
 */
export function resolveCli(): string[] {
  const override = process.env.FASTSDR_CLI;
  if (override !== undefined && override.trim() !== "") {
    return override.trim().split(/\s+/);
  }
  return ["python3", "-m", "fastsdr"];
}

function parseStderr(stderr: string, exitCode: number): CliError {
  let type = "UnknownError";
  let message = stderr.trim();
  try {
    const doc = JSON.parse(stderr);
    type = String(doc.error.type);
    message = String(doc.error.message);
  } catch {
    // keep the raw stderr when it is not the expected JSON object
  }
  const cls = ERROR_BY_CODE[exitCode] ?? CliError;
  return new cls(message, exitCode, type);
}

/** Run the CLI with the given arguments and resolve with its stdout. */
export function runCli(args: string[], timeoutMs = 300_000): Promise<string> {
  const [cmd, ...prefix] = resolveCli();
  if (cmd === undefined) {
    return Promise.reject(new Error("FASTSDR_CLI resolved to an empty command"));
  }
  return new Promise((resolve, reject) => {
    execFile(
      cmd,
      [...prefix, ...args],
      { timeout: timeoutMs, maxBuffer: 64 * 1024 * 1024, windowsHide: true },
      (err, stdout, stderr) => {
        if (err === null) {
          resolve(stdout);
          return;
        }
        const code = (err as NodeJS.ErrnoException & { code?: number | string }).code;
        if (typeof code === "number" && code in ERROR_BY_CODE) {
          reject(parseStderr(stderr, code));
        } else {
          reject(new Error(`evaluator process failed (${String(code)}): ${stderr || err.message}`));
        }
      },
    );
  });
}
