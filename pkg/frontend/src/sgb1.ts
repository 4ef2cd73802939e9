/**
 * Reader for the SGB1 binary grid format emitted by
 * `sgp4kit batch --format binary`.
 *
 * Layout, all little-endian:
 *   bytes 0..3    magic "SGB1"
 *   bytes 4..11   N (uint64), satellite count
 *   bytes 12..19  M (uint64), time count
 *   bytes 20..23  precision in bits (32 or 64)
 *   bytes 24..31  plane-order tag "rrrvvve\0"
 *   then six row-major N*M float planes rx, ry, rz, vx, vy, vz
 *   then one row-major N*M int32 error plane
 *
 * Planes are exposed as typed-array views over the input buffer when
 * its byte offset permits aligned views; otherwise the payload is
 * copied once into an aligned buffer.
 */

export const SGB1_MAGIC = "SGB1";
export const SGB1_HEADER_BYTES = 32;
export const PLANE_ORDER_TAG = "rrrvvve\0";
export const PLANE_NAMES = ["rx", "ry", "rz", "vx", "vy", "vz"] as const;

export type PlaneName = (typeof PLANE_NAMES)[number];
export type FloatPlane = Float32Array | Float64Array;

export interface CellState {
  r: [number, number, number];
  v: [number, number, number];
  errorCode: number;
}

export class Sgb1FormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "Sgb1FormatError";
  }
}

export class Sgb1Grid {
  /** True when the planes are views over the caller's buffer. */
  readonly zeroCopy: boolean;

  constructor(
    readonly n: number,
    readonly m: number,
    readonly precision: 32 | 64,
    private readonly planes: readonly FloatPlane[],
    readonly error: Int32Array,
    zeroCopy: boolean,
  ) {
    this.zeroCopy = zeroCopy;
  }

  /** Row-major N*M view of one state component. */
  plane(name: PlaneName): FloatPlane {
    const index = PLANE_NAMES.indexOf(name);
    const plane = this.planes[index];
    if (plane === undefined) {
      throw new RangeError(`unknown plane ${name}`);
    }
    return plane;
  }

  /** One grid cell: satellite i at time index j. */
  cell(i: number, j: number): CellState {
    if (i < 0 || i >= this.n || j < 0 || j >= this.m) {
      throw new RangeError(`cell (${i}, ${j}) outside ${this.n} x ${this.m}`);
    }
    const at = i * this.m + j;
    const value = (p: number): number => this.planes[p]![at]!;
    return {
      r: [value(0), value(1), value(2)],
      v: [value(3), value(4), value(5)],
      errorCode: this.error[at]!,
    };
  }
}

function ascii(view: DataView, offset: number, length: number): string {
  let out = "";
  for (let i = 0; i < length; i++) {
    out += String.fromCharCode(view.getUint8(offset + i));
  }
  return out;
}

/** Parse an SGB1 payload. */
export function parseGrid(data: Uint8Array): Sgb1Grid {
  if (data.byteLength < SGB1_HEADER_BYTES) {
    throw new Sgb1FormatError(
      `payload of ${data.byteLength} bytes is shorter than the header`,
    );
  }
  const header = new DataView(data.buffer, data.byteOffset, SGB1_HEADER_BYTES);
  const magic = ascii(header, 0, 4);
  if (magic !== SGB1_MAGIC) {
    throw new Sgb1FormatError(`bad magic ${JSON.stringify(magic)}`);
  }
  const n = Number(header.getBigUint64(4, true));
  const m = Number(header.getBigUint64(12, true));
  const precision = header.getUint32(20, true);
  if (precision !== 32 && precision !== 64) {
    throw new Sgb1FormatError(`unsupported precision ${precision}`);
  }
  const tag = ascii(header, 24, 8);
  if (tag !== PLANE_ORDER_TAG) {
    throw new Sgb1FormatError(`unknown plane order tag ${JSON.stringify(tag)}`);
  }

  const cells = n * m;
  const itemBytes = precision / 8;
  const expected = SGB1_HEADER_BYTES + cells * (6 * itemBytes + 4);
  if (data.byteLength !== expected) {
    throw new Sgb1FormatError(
      `expected ${expected} bytes for a ${n} x ${m} grid at ` +
        `${precision}-bit, got ${data.byteLength}`,
    );
  }

  // Typed-array views need the plane start aligned to the element
  // size. The header is 32 bytes, so alignment depends only on the
  // caller's byte offset; realign with one copy when needed.
  let payload = data;
  const zeroCopy = data.byteOffset % Math.max(itemBytes, 4) === 0;
  if (!zeroCopy) {
    payload = new Uint8Array(data); // fresh buffer at offset 0
  }

  const FloatArray = precision === 32 ? Float32Array : Float64Array;
  // Node Buffers may sit on a shared pool; the view constructors only
  // care about the backing store, so narrow the type explicitly.
  const buffer = payload.buffer as ArrayBuffer;
  const planes: FloatPlane[] = [];
  let offset = payload.byteOffset + SGB1_HEADER_BYTES;
  for (let p = 0; p < 6; p++) {
    planes.push(new FloatArray(buffer, offset, cells));
    offset += cells * itemBytes;
  }
  const error = new Int32Array(buffer, offset, cells);
  return new Sgb1Grid(n, m, precision, planes, error, zeroCopy);
}
