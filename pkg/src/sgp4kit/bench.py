"""Timing protocol and scaling sweeps.

Measurement rule: one untimed warm-up execution; iterations doubled
from 1 until a trial exceeds 0.2 s of wall-clock; five trials at that
iteration count; report the minimum per-run time. The minimum is used
because system noise only ever slows a run down, so the fastest trial
best reflects the hardware. Inputs are always materialised before the
timed region.
"""

from __future__ import annotations

import io
import time
from dataclasses import dataclass

import numpy as np

from .batch import init_batch, propagate_batch
from .gravity import WGS72

MIN_TRIAL_SECONDS = 0.2
TRIALS = 5


class TaskFailed(RuntimeError):
    def __init__(self, trial_index: int, cause: BaseException):
        super().__init__(f"benchmark task failed in trial {trial_index}: {cause}")
        self.trial_index = trial_index
        self.__cause__ = cause


@dataclass(frozen=True)
class BenchRecord:
    label: str
    n: int
    m: int
    precision: int
    workers: int
    iterations: int
    trials: int
    min_time_s: float
    total_cells: int
    throughput_cells_per_s: float
    axis: str = ""


def time_task(task, label: str = "task", n: int = 1, m: int = 1,
              precision: int = 64, workers: int = 1,
              axis: str = "") -> BenchRecord:
    """Apply the min-of-five-trials protocol to a repeatable callable."""
    clock = time.perf_counter

    def trial(iterations: int, index: int) -> float:
        try:
            start = clock()
            for _ in range(iterations):
                task()
            return clock() - start
        except Exception as exc:
            raise TaskFailed(index, exc) from exc

    task()  # warm-up, never timed

    # double until even the fastest of the five trials clears the
    # threshold, so iterations * min_time >= MIN_TRIAL_SECONDS holds
    iterations = 1
    while True:
        if trial(iterations, 0) > MIN_TRIAL_SECONDS:
            best = min(trial(iterations, i + 1) for i in range(TRIALS))
            if best > MIN_TRIAL_SECONDS:
                break
        iterations *= 2
    min_time = best / iterations
    cells = n * m
    return BenchRecord(
        label=label, n=n, m=m, precision=precision, workers=workers,
        iterations=iterations, trials=TRIALS, min_time_s=min_time,
        total_cells=cells,
        throughput_cells_per_s=cells / min_time if min_time > 0 else float("inf"),
        axis=axis,
    )


def _tiled(elements, count: int) -> list:
    """Repeat a base catalogue to the requested size."""
    reps = -(-count // len(elements))
    return (list(elements) * reps)[:count]


def scaling_sweep(axis: str, sizes, fixed_other: int, elements,
                  precision: int = 64, workers: int = 1,
                  full_pipeline: bool = True) -> list[BenchRecord]:
    """One timed record per size along the satellite or time axis.

    The satellite catalogue is tiled when a size exceeds the supplied
    element list. Running out of memory stops the sweep at the last
    completed size.
    """
    if axis not in ("satellites", "times"):
        raise ValueError(f"axis must be 'satellites' or 'times', got {axis!r}")
    if list(sizes) != sorted(set(sizes)):
        raise ValueError("sizes must be strictly increasing")
    records = []
    for size in sizes:
        n, m = (size, fixed_other) if axis == "satellites" else (fixed_other, size)
        sats_elems = _tiled(elements, n)
        times = np.linspace(0.0, 1440.0, m)
        try:
            if full_pipeline:
                def task():
                    propagate_batch(init_batch(sats_elems, WGS72, precision),
                                    times, workers=workers)
            else:
                batch = init_batch(sats_elems, WGS72, precision)

                def task():
                    propagate_batch(batch, times, workers=workers)
            records.append(time_task(
                task, label=f"{axis}-{size}", n=n, m=m, precision=precision,
                workers=workers, axis=axis))
        except MemoryError:
            break
    return records


def emit_bench_csv(records) -> str:
    out = io.StringIO()
    out.write("label,axis,n,m,precision,workers,iterations,trials,"
              "min_time_s,throughput_cells_per_s\n")
    for r in records:
        out.write(f"{r.label},{r.axis},{r.n},{r.m},{r.precision},{r.workers},"
                  f"{r.iterations},{r.trials},{r.min_time_s:.9g},"
                  f"{r.throughput_cells_per_s:.9g}\n")
    return out.getvalue()
