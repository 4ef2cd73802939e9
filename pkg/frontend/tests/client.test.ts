import { mkdtemp, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import {
  parseGrid,
  PLANE_NAMES,
  propagateBatch,
  runCli,
  Sgb1FormatError,
  TleParseError,
  type TleRecord,
} from "../src/index.js";

/** Modulo-10 TLE checksum: digits count, '-' counts 1. */
function lineChecksum(line: string): number {
  let total = 0;
  for (const ch of line.slice(0, 68)) {
    if (ch >= "0" && ch <= "9") total += Number(ch);
    else if (ch === "-") total += 1;
  }
  return total % 10;
}

function withChecksums(l1: string, l2: string): TleRecord {
  const pad = (s: string) => s.padEnd(68).slice(0, 68);
  return [
    pad(l1) + String(lineChecksum(pad(l1))),
    pad(l2) + String(lineChecksum(pad(l2))),
  ];
}

const RECORDS: TleRecord[] = [
  withChecksums(
    "1 25544U 98067A   20344.91667824  .00016717  00000-0  10270-3 0  9000",
    "2 25544  51.6442  21.0000 0001882 345.0000  15.0000 15.49309239  1000",
  ),
  withChecksums(
    "1 44713U 19074A   23001.00001157  .00002182  00000-0  16538-3 0  9991",
    "2 44713  53.0541 236.0710 0001291  90.7840 269.3301 15.06391223174712",
  ),
  withChecksums(
    "1 43013U 17073A   23010.50000000  .00000123  00000-0  45000-4 0  9990",
    "2 43013  98.7213 310.1124 0001450  95.2110 264.9230 14.19552408265511",
  ),
];

const TIMES = [0, 30, 60.5, 720, 1440];

let workDir: string;
let catalogue: string;

beforeAll(async () => {
  workDir = await mkdtemp(join(tmpdir(), "sgp4kit-test-"));
  catalogue = join(workDir, "records.tle");
  const text = RECORDS.flatMap(([l1, l2]) => [l1, l2]).join("\n") + "\n";
  await writeFile(catalogue, text, "utf8");
});

afterAll(async () => {
  await rm(workDir, { recursive: true, force: true });
});

interface CsvRow {
  values: number[]; // rx..vz
  errorCode: number;
}

async function batchCsv(precision: 32 | 64): Promise<CsvRow[]> {
  const run = await runCli([
    "batch",
    catalogue,
    "--tsince-list",
    TIMES.join(","),
    "--precision",
    String(precision),
    "--out",
    "-",
  ]);
  expect(run.exitCode).toBe(0);
  const lines = run.stdout.toString("utf8").trim().split("\n");
  expect(lines[0]).toBe("tsince_min,rx,ry,rz,vx,vy,vz,error_code");
  return lines.slice(1).map((line) => {
    const fields = line.split(",");
    return {
      values: fields.slice(1, 7).map(Number),
      errorCode: Number(fields[7]),
    };
  });
}

describe("propagateBatch", () => {
  for (const precision of [64, 32] as const) {
    it(`matches the CLI CSV bitwise for a 3x5 probe at ${precision}-bit`, async () => {
      const grid = await propagateBatch(RECORDS, TIMES, { precision });
      expect(grid.n).toBe(3);
      expect(grid.m).toBe(5);
      expect(grid.precision).toBe(precision);

      // CSV prints shortest-round-trip decimals, so parsing a row
      // back recovers the exact binary value at either precision.
      const rows = await batchCsv(precision);
      expect(rows).toHaveLength(15);
      for (let i = 0; i < grid.n; i++) {
        for (let j = 0; j < grid.m; j++) {
          const row = rows[i * grid.m + j]!;
          const cell = grid.cell(i, j);
          expect([...cell.r, ...cell.v]).toEqual(row.values);
          expect(cell.errorCode).toBe(row.errorCode);
        }
      }
    });
  }

  it("matches the CLI propagate row for one record and one time", async () => {
    const grid = await propagateBatch([RECORDS[0]!], [60], {});
    const run = await runCli([
      "propagate",
      catalogue,
      "--tsince-list",
      "60",
      "--out",
      "-",
    ]);
    expect(run.exitCode).toBe(0);
    const fields = run.stdout.toString("utf8").trim().split("\n")[1]!.split(",");
    const cell = grid.cell(0, 0);
    expect([...cell.r, ...cell.v]).toEqual(fields.slice(1, 7).map(Number));
    expect(cell.errorCode).toBe(Number(fields[7]));
  });

  it("exposes planes in rx..vz order", async () => {
    const grid = await propagateBatch(RECORDS, [0], {});
    const cell = grid.cell(1, 0);
    const fromPlanes = PLANE_NAMES.map((name) => grid.plane(name)[grid.m * 1]);
    expect(fromPlanes).toEqual([...cell.r, ...cell.v]);
  });

  it("rejects an empty record list with a structured error", async () => {
    await expect(propagateBatch([], [0])).rejects.toBeInstanceOf(TleParseError);
  });

  it("reports the failing record indices on parse errors", async () => {
    const corrupt: TleRecord = [
      RECORDS[1]![0],
      "2 !" + RECORDS[1]![1].slice(3),
    ];
    const error = await propagateBatch(
      [RECORDS[0]!, corrupt, RECORDS[2]!],
      [0],
    ).then(
      () => {
        throw new Error("expected a parse failure");
      },
      (err: unknown) => err,
    );
    expect(error).toBeInstanceOf(TleParseError);
    expect((error as TleParseError).recordIndices).toEqual([1]);
    expect((error as TleParseError).stderr).toContain("parse error");
  });

  it("enforces checksums only when strict", async () => {
    const bad: TleRecord = [
      RECORDS[0]![0].slice(0, 68) +
        String((Number(RECORDS[0]![0][68]) + 1) % 10),
      RECORDS[0]![1],
    ];
    const grid = await propagateBatch([bad], [0]);
    expect(grid.n).toBe(1);
    await expect(
      propagateBatch([bad], [0], { strict: true }),
    ).rejects.toBeInstanceOf(TleParseError);
  });
});

describe("parseGrid", () => {
  async function rawGrid(): Promise<Buffer> {
    const run = await runCli([
      "batch",
      catalogue,
      "--tsince-list",
      "0,60",
      "--format",
      "binary",
      "--out",
      "-",
    ]);
    expect(run.exitCode).toBe(0);
    return run.stdout;
  }

  it("is zero-copy for aligned input and copies otherwise", async () => {
    const raw = await rawGrid();
    const aligned = new Uint8Array(raw); // fresh buffer, offset 0
    expect(parseGrid(aligned).zeroCopy).toBe(true);

    const shifted = new Uint8Array(raw.byteLength + 1);
    shifted.set(raw, 1);
    const view = new Uint8Array(shifted.buffer, 1, raw.byteLength);
    const copied = parseGrid(view);
    expect(copied.zeroCopy).toBe(false);
    expect([...copied.plane("rx")]).toEqual([
      ...parseGrid(aligned).plane("rx"),
    ]);
  });

  it("rejects bad magic and truncated payloads", async () => {
    const raw = new Uint8Array(await rawGrid());
    const bad = new Uint8Array(raw);
    bad[0] = "X".charCodeAt(0);
    expect(() => parseGrid(bad)).toThrow(Sgb1FormatError);
    expect(() => parseGrid(raw.slice(0, raw.byteLength - 4))).toThrow(
      Sgb1FormatError,
    );
    expect(() => parseGrid(raw.slice(0, 16))).toThrow(Sgb1FormatError);
  });

  it("bounds-checks cell access", async () => {
    const grid = parseGrid(new Uint8Array(await rawGrid()));
    expect(() => grid.cell(grid.n, 0)).toThrow(RangeError);
    expect(() => grid.cell(0, -1)).toThrow(RangeError);
  });
});
