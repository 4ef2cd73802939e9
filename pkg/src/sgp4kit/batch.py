"""Two-axis batch propagation over a deterministic worker pool.

Satellites are held as a structure-of-arrays :class:`SatBatch`; the
output is a dense N x M grid (six value planes plus an error plane).
Work is split into disjoint 2D tiles so that working memory excluding
the output grid stays O(N + M + tile) and output content never depends
on worker count or scheduling.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields as dataclass_fields
from typing import Any, Callable, Sequence

import numpy as np

from .gravity import WGS72, GravityModel
from .kernel import SatInit, sgp4_init, sgp4_propagate
from .tle import MeanElements

PLANE_NAMES = ("rx", "ry", "rz", "vx", "vy", "vz")

MAGIC = b"SGB1"
# header: magic, N (u64), M (u64), precision bits (u32), plane order tag
_HEADER = struct.Struct("<4sQQI8s")
PLANE_ORDER_TAG = b"rrrvvve\x00"

DEFAULT_TILE_CELLS = 1 << 18


class GridAllocationError(MemoryError):
    """Output grid could not be allocated; carries the requested size."""

    def __init__(self, n: int, m: int, nbytes: int):
        super().__init__(
            f"cannot allocate {n}x{m} output grid ({nbytes} bytes)")
        self.n = n
        self.m = m
        self.nbytes = nbytes


class StreamAborted(RuntimeError):
    """Sink failure during streaming; carries tiles completed so far."""

    def __init__(self, tiles_completed: int, cause: BaseException):
        super().__init__(
            f"sink failed after {tiles_completed} tiles: {cause}")
        self.tiles_completed = tiles_completed
        self.__cause__ = cause


@dataclass(frozen=True)
class SatBatch:
    """Structure-of-arrays of initialization constants, length n."""

    init: SatInit
    n: int

    @property
    def error_codes(self) -> np.ndarray:
        return np.asarray(self.init.error_code_at_init)


@dataclass(frozen=True)
class BatchResult:
    """Dense N x M grid: planes (6, N, M) and error codes (N, M)."""

    planes: np.ndarray
    error: np.ndarray
    n: int
    m: int

    @property
    def r(self) -> np.ndarray:
        return np.moveaxis(self.planes[:3], 0, -1)

    @property
    def v(self) -> np.ndarray:
        return np.moveaxis(self.planes[3:], 0, -1)


def _dtype_for(precision: int):
    if precision == 32:
        return np.float32
    if precision == 64:
        return np.float64
    raise ValueError(f"precision must be 32 or 64, got {precision}")


def init_batch(elements: Sequence[MeanElements], grav: GravityModel = WGS72,
               precision: int = 64) -> SatBatch:
    """Vectorized initialization of many satellites at once."""
    if not elements:
        raise ValueError("empty element list")
    dtype = _dtype_for(precision)
    stacked = MeanElements(
        no_kozai=np.array([e.no_kozai for e in elements], dtype=dtype),
        ecco=np.array([e.ecco for e in elements], dtype=dtype),
        inclo=np.array([e.inclo for e in elements], dtype=dtype),
        nodeo=np.array([e.nodeo for e in elements], dtype=dtype),
        argpo=np.array([e.argpo for e in elements], dtype=dtype),
        mo=np.array([e.mo for e in elements], dtype=dtype),
        bstar=np.array([e.bstar for e in elements], dtype=dtype),
        epoch_year=0, epoch_day_int=1, epoch_day_frac=0.0,
    )
    return SatBatch(init=sgp4_init(stacked, grav, dtype=dtype),
                    n=len(elements))


def _slice_init(init: SatInit, rows: slice) -> SatInit:
    """Row-slice every array field and add a trailing broadcast axis."""
    out = {}
    for f in dataclass_fields(SatInit):
        value = getattr(init, f.name)
        if f.name in ("grav", "dtype"):
            out[f.name] = value
            continue
        arr = np.asarray(value)
        out[f.name] = arr[rows][:, None] if arr.ndim else arr
    return SatInit(**out)


def partition_work(n: int, m: int, workers: int) -> list[tuple[int, int]]:
    """Balanced, disjoint, covering ranges over the flat N*M index space.

    Scheduling only: the partition never influences output content.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    total = n * m
    k = min(workers, total)
    base, rem = divmod(total, k)
    ranges = []
    start = 0
    for i in range(k):
        size = base + (1 if i < rem else 0)
        ranges.append((start, start + size))
        start += size
    return ranges


def _tile_grid(n: int, m: int, tile_rows: int, tile_cols: int):
    """Row-major list of (row-slice, col-slice) tiles covering N x M."""
    tiles = []
    for r0 in range(0, n, tile_rows):
        for c0 in range(0, m, tile_cols):
            tiles.append((slice(r0, min(r0 + tile_rows, n)),
                          slice(c0, min(c0 + tile_cols, m))))
    return tiles


def _default_tile_rows(n: int, m: int) -> int:
    return max(1, min(n, DEFAULT_TILE_CELLS // max(m, 1)))


def _compute_tile(init: SatInit, times: np.ndarray, rows: slice, cols: slice):
    sub = _slice_init(init, rows)
    state = sgp4_propagate(sub, times[cols])
    planes = np.moveaxis(np.concatenate([state.r, state.v], axis=-1), -1, 0)
    return planes, np.broadcast_to(state.error_code,
                                   planes.shape[1:]).astype(np.int32)


def propagate_batch(sats: SatBatch, times, workers: int | None = None) -> BatchResult:
    """Propagate every satellite to every time.

    Cell (i, j) is bitwise equal to the scalar kernel applied to
    satellite i at time j, at the batch's precision, for any worker
    count.
    """
    dtype = sats.init.dtype
    times = np.asarray(times, dtype=dtype)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-D array")
    n, m = sats.n, times.size
    try:
        planes = np.empty((6, n, m), dtype=dtype)
        error = np.empty((n, m), dtype=np.int32)
    except MemoryError:
        raise GridAllocationError(
            n, m, 6 * n * m * np.dtype(dtype).itemsize + 4 * n * m) from None

    tiles = _tile_grid(n, m, _default_tile_rows(n, m), m)

    def run(tile):
        rows, cols = tile
        tplanes, terror = _compute_tile(sats.init, times, rows, cols)
        planes[:, rows, cols] = tplanes
        error[rows, cols] = terror

    if workers is None or workers <= 1 or len(tiles) == 1:
        for tile in tiles:
            run(tile)
    else:
        chunks = partition_work(len(tiles), 1, workers)

        def run_chunk(chunk):
            for tile in tiles[chunk[0]:chunk[1]]:
                run(tile)

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_chunk, chunks))
    return BatchResult(planes=planes, error=error, n=n, m=m)


@dataclass(frozen=True)
class StreamSummary:
    cells_emitted: int
    nonzero_error_count: int


def propagate_batch_streamed(sats: SatBatch, times, tile_rows: int,
                             tile_cols: int,
                             sink: Callable[[slice, slice, np.ndarray, np.ndarray], Any]
                             ) -> StreamSummary:
    """Tile-by-tile propagation without materialising the full grid.

    Tiles are produced in row-major order; peak auxiliary memory is
    bounded by O(N + M + tile_rows * tile_cols). A sink exception
    aborts the stream with the number of tiles already delivered.
    """
    if tile_rows < 1 or tile_cols < 1:
        raise ValueError("tile dimensions must be >= 1")
    dtype = sats.init.dtype
    times = np.asarray(times, dtype=dtype)
    n, m = sats.n, times.size
    cells = 0
    errors = 0
    completed = 0
    for rows, cols in _tile_grid(n, m, tile_rows, tile_cols):
        tplanes, terror = _compute_tile(sats.init, times, rows, cols)
        try:
            sink(rows, cols, tplanes, terror)
        except Exception as exc:
            raise StreamAborted(completed, exc) from exc
        completed += 1
        cells += terror.size
        errors += int(np.count_nonzero(terror))
    return StreamSummary(cells_emitted=cells, nonzero_error_count=errors)


def write_grid_binary(result: BatchResult, stream) -> None:
    """Little-endian dump: 32-byte header then planes rx..vz, error."""
    precision = np.dtype(result.planes.dtype).itemsize * 8
    stream.write(_HEADER.pack(MAGIC, result.n, result.m, precision,
                              PLANE_ORDER_TAG))
    for plane in result.planes:
        stream.write(np.ascontiguousarray(plane, dtype=f"<f{precision // 8}").tobytes())
    stream.write(np.ascontiguousarray(result.error, dtype="<i4").tobytes())


def read_grid_binary(stream) -> BatchResult:
    """Inverse of :func:`write_grid_binary`."""
    header = stream.read(_HEADER.size)
    magic, n, m, precision, tag = _HEADER.unpack(header)
    if magic != MAGIC:
        raise ValueError(f"bad magic: {magic!r}")
    if tag != PLANE_ORDER_TAG:
        raise ValueError(f"unknown plane order tag: {tag!r}")
    dtype = _dtype_for(precision)
    itemsize = np.dtype(dtype).itemsize
    planes = np.frombuffer(stream.read(6 * n * m * itemsize),
                           dtype=f"<f{itemsize}").reshape(6, n, m).astype(dtype)
    error = np.frombuffer(stream.read(4 * n * m),
                          dtype="<i4").reshape(n, m)
    return BatchResult(planes=planes, error=np.asarray(error, dtype=np.int32),
                       n=n, m=m)
