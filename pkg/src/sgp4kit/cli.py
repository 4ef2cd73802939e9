"""Command-line front end.

stdout carries machine-parseable output only (CSV or the binary grid
format); every diagnostic goes to stderr. Exit codes: 0 success,
1 usage error, 2 TLE/OMM parse error, 3 runtime failure. Error codes
inside propagation output never affect the exit code; results are
computed in full and flagged, and consumers filter on the error column.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import bench as benchmod
from . import drift as driftmod
from .batch import init_batch, propagate_batch, write_grid_binary
from .jacobian import ELEMENT_NAMES, jacobian_state_wrt_elements
from .kernel import epoch_to_julian
from .tle import TleError, read_tle_file, tle_to_elements
from .tle import _iso_epoch_to_split  # calendar helper shared with OMM parsing

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_RUNTIME = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="sgp4kit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, times=True):
        p.add_argument("input", help="TLE file")
        p.add_argument("--precision", type=int, choices=(32, 64), default=64)
        p.add_argument("--workers", type=int,
                       default=int(os.environ.get("SGP4_BATCH_WORKERS", 0)) or None)
        p.add_argument("--strict", action="store_true",
                       help="error on TLE checksum mismatches")
        p.add_argument("--out", default="-", help="output path, '-' for stdout")
        if times:
            p.add_argument("--tsince", metavar="START:STOP:STEP",
                           help="minutes since epoch, stop exclusive")
            p.add_argument("--tsince-list", metavar="V1,V2,...",
                           help="explicit minutes since epoch")
            p.add_argument("--utc-list", metavar="ISO1,ISO2,...",
                           help="absolute UTC times, converted via the "
                                "64-bit epoch helper")

    p = sub.add_parser("propagate", help="one TLE to one or more times")
    common(p)

    p = sub.add_parser("batch", help="TLE file x time grid")
    common(p)
    p.add_argument("--format", choices=("csv", "binary"), default="csv")

    p = sub.add_parser("jacobian", help="6x7 state/element Jacobian")
    common(p, times=False)
    p.add_argument("--tsince", type=float, default=0.0,
                   help="minutes since epoch")

    p = sub.add_parser("precision-report", help="FP32 vs FP64 drift CSV")
    common(p, times=False)
    p.add_argument("--horizon-days", type=float, default=14.0)
    p.add_argument("--step-minutes", type=float, default=90.0)

    p = sub.add_parser("bench", help="timing sweep CSV")
    p.add_argument("input", help="TLE file providing the base catalogue")
    p.add_argument("--axis", choices=("satellites", "times"),
                   default="satellites")
    p.add_argument("--sizes", required=True, metavar="S1,S2,...")
    p.add_argument("--fixed", type=int, default=1,
                   help="size of the non-swept axis")
    p.add_argument("--precision", type=int, choices=(32, 64), default=64)
    p.add_argument("--workers", type=int,
                   default=int(os.environ.get("SGP4_BATCH_WORKERS", 0)) or None)
    p.add_argument("--propagate-only", action="store_true",
                   help="exclude initialization from the timed region")
    p.add_argument("--out", default="-")
    return parser


def _times_from_args(args, elements) -> np.ndarray:
    given = [x for x in (args.tsince, args.tsince_list, args.utc_list)
             if x is not None]
    if len(given) != 1:
        raise _UsageError(
            "exactly one of --tsince, --tsince-list, --utc-list is required")
    if args.tsince is not None:
        parts = args.tsince.split(":")
        if len(parts) != 3:
            raise _UsageError("--tsince wants START:STOP:STEP")
        start, stop, step = (float(x) for x in parts)
        if step <= 0:
            raise _UsageError("--tsince step must be positive")
        return np.arange(start, stop, step)
    if args.tsince_list is not None:
        return np.array([float(x) for x in args.tsince_list.split(",")])
    # absolute UTC, 64-bit only: offset against the first record's epoch
    e = elements[0]
    epoch_jd = epoch_to_julian(e.epoch_year, e.epoch_day_int, e.epoch_day_frac)
    minutes = []
    for stamp in args.utc_list.split(","):
        year, doy, frac = _iso_epoch_to_split(stamp)
        minutes.append((epoch_to_julian(year, doy, frac) - epoch_jd) * 1440.0)
    return np.array(minutes)


def _state_csv(times, result, out) -> None:
    out.write("tsince_min,rx,ry,rz,vx,vy,vz,error_code\n")
    for i in range(result.n):
        for j in range(result.m):
            vals = result.planes[:, i, j]
            out.write(f"{times[j]:.9g}," +
                      ",".join(format(float(x), ".17g") for x in vals) +
                      f",{int(result.error[i, j])}\n")


def _open_out(path, binary=False):
    if path == "-":
        return (sys.stdout.buffer if binary else sys.stdout), False
    return open(path, "wb" if binary else "w"), True


def _run(args) -> int:
    if args.command == "bench":
        records = benchmod.scaling_sweep(
            axis=args.axis,
            sizes=[int(s) for s in args.sizes.split(",")],
            fixed_other=args.fixed,
            elements=[tle_to_elements(t) for t in read_tle_file(args.input)],
            precision=args.precision,
            workers=args.workers or 1,
            full_pipeline=not args.propagate_only)
        out, close = _open_out(args.out)
        out.write(benchmod.emit_bench_csv(records))
        if close:
            out.close()
        return EXIT_OK

    tles = read_tle_file(args.input, strict=args.strict)
    if not tles:
        raise TleError(f"no TLE records found in {args.input}")
    for t in tles:
        for w in t.warnings:
            print(f"warning: catalog {t.catalog_number}: {w}", file=sys.stderr)
    elements = [tle_to_elements(t) for t in tles]

    if args.command == "propagate":
        times = _times_from_args(args, elements)
        result = propagate_batch(init_batch(elements[:1], precision=args.precision),
                                 times, workers=args.workers)
        out, close = _open_out(args.out)
        _state_csv(times, result, out)
        if close:
            out.close()
        return EXIT_OK

    if args.command == "batch":
        times = _times_from_args(args, elements)
        result = propagate_batch(init_batch(elements, precision=args.precision),
                                 times, workers=args.workers)
        binary = args.format == "binary"
        out, close = _open_out(args.out, binary=binary)
        if binary:
            write_grid_binary(result, out)
            out.flush()
        else:
            _state_csv(times, result, out)
        if close:
            out.close()
        return EXIT_OK

    if args.command == "jacobian":
        jac = jacobian_state_wrt_elements(elements[0], tsince_min=args.tsince)
        if not jac.valid:
            print(f"warning: propagation error code {jac.error_code}; "
                  "Jacobian flagged invalid", file=sys.stderr)
        out, close = _open_out(args.out)
        out.write("state," + ",".join(ELEMENT_NAMES) + "\n")
        for name, row in zip(("rx", "ry", "rz", "vx", "vy", "vz"), jac.matrix):
            out.write(name + "," +
                      ",".join(format(float(x), ".17g") for x in row) + "\n")
        if close:
            out.close()
        return EXIT_OK

    if args.command == "precision-report":
        report = driftmod.drift_report(elements, args.horizon_days,
                                       args.step_minutes)
        out, close = _open_out(args.out)
        out.write(driftmod.emit_report_csv(report))
        if close:
            out.close()
        return EXIT_OK

    raise _UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except TleError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BrokenPipeError:
        return EXIT_RUNTIME
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
