/**
 * Client for the sgp4kit command line. The CLI is the only boundary:
 * TLE records go in as a temporary file, results come back as the
 * SGB1 binary grid on stdout, diagnostics on stderr. Exit code 2
 * marks a parse failure and is rethrown as a structured error
 * carrying the indices of the offending records.
 */

import { spawn } from "node:child_process";
import { mkdtemp, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { parseGrid, Sgb1Grid } from "./sgb1.js";

/** A two-line element record: line 1 and line 2, 69 columns each. */
export type TleRecord = readonly [string, string];

export interface PropagateOptions {
  /** Working precision in bits; the default matches the CLI. */
  precision?: 32 | 64;
  /** Worker thread count forwarded to the CLI; omitted by default. */
  workers?: number;
  /** Fail on checksum mismatches instead of recording a warning. */
  strict?: boolean;
  /** Command vector to launch, e.g. ["python3", "-m", "sgp4kit.cli"]. */
  command?: readonly string[];
}

export class TleParseError extends Error {
  constructor(
    message: string,
    /** Zero-based indices of the records that failed to parse. */
    readonly recordIndices: readonly number[],
    /** Raw CLI diagnostics, empty when the CLI never ran. */
    readonly stderr: string = "",
  ) {
    super(message);
    this.name = "TleParseError";
  }
}

export class CliError extends Error {
  constructor(
    message: string,
    readonly exitCode: number,
    readonly stderr: string,
  ) {
    super(message);
    this.name = "CliError";
  }
}

export interface CliRun {
  exitCode: number;
  stdout: Buffer;
  stderr: string;
}

const EXIT_PARSE = 2;

/** Run the CLI once, capturing binary stdout and text stderr. */
export function runCli(
  args: readonly string[],
  command: readonly string[] = ["sgp4kit"],
): Promise<CliRun> {
  const [executable, ...prefix] = command;
  if (executable === undefined) {
    throw new TypeError("empty command vector");
  }
  return new Promise((resolve, reject) => {
    const child = spawn(executable, [...prefix, ...args], {
      stdio: ["ignore", "pipe", "pipe"],
    });
    const out: Buffer[] = [];
    const err: Buffer[] = [];
    child.stdout.on("data", (chunk: Buffer) => out.push(chunk));
    child.stderr.on("data", (chunk: Buffer) => err.push(chunk));
    child.on("error", reject);
    child.on("close", (code) => {
      resolve({
        exitCode: code ?? -1,
        stdout: Buffer.concat(out),
        stderr: Buffer.concat(err).toString("utf8"),
      });
    });
  });
}

function parseFailureIndices(stderr: string): number[] {
  // read_tle_file reports "record <index> at line <line>: <cause>"
  const indices = new Set<number>();
  for (const match of stderr.matchAll(/record (\d+) at line \d+/g)) {
    indices.add(Number(match[1]));
  }
  return [...indices].sort((a, b) => a - b);
}

/**
 * Propagate every record to every time through the CLI's binary batch
 * interface. Cell values are bitwise identical to the core's output
 * at the requested precision.
 */
export async function propagateBatch(
  records: readonly TleRecord[],
  timesMin: readonly number[],
  options: PropagateOptions = {},
): Promise<Sgb1Grid> {
  if (records.length === 0) {
    throw new TleParseError("empty TLE record list", []);
  }
  if (timesMin.length === 0) {
    throw new RangeError("empty time list");
  }
  const { precision = 64, workers, strict = false, command } = options;

  const dir = await mkdtemp(join(tmpdir(), "sgp4kit-"));
  const catalogue = join(dir, "records.tle");
  try {
    const text = records.flatMap(([l1, l2]) => [l1, l2]).join("\n") + "\n";
    await writeFile(catalogue, text, "utf8");

    const args = [
      "batch",
      catalogue,
      "--tsince-list",
      timesMin.join(","),
      "--precision",
      String(precision),
      "--format",
      "binary",
      "--out",
      "-",
    ];
    if (workers !== undefined) {
      args.push("--workers", String(workers));
    }
    if (strict) {
      args.push("--strict");
    }

    const run = await runCli(args, command);
    if (run.exitCode === EXIT_PARSE) {
      throw new TleParseError(
        run.stderr.trim() || "TLE parse failure",
        parseFailureIndices(run.stderr),
        run.stderr,
      );
    }
    if (run.exitCode !== 0) {
      throw new CliError(
        `sgp4kit batch exited with code ${run.exitCode}: ` +
          run.stderr.trim(),
        run.exitCode,
        run.stderr,
      );
    }
    return parseGrid(run.stdout);
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}
