"""Batch-parallel, precision-flexible, differentiable SGP4 propagation.

Near-Earth satellites only; records with orbital periods of 225 minutes
or more are flagged at initialization rather than propagated with the
deep-space corrections.
"""

from .batch import (
    BatchResult,
    GridAllocationError,
    SatBatch,
    StreamAborted,
    StreamSummary,
    init_batch,
    partition_work,
    propagate_batch,
    propagate_batch_streamed,
    read_grid_binary,
    write_grid_binary,
)
from .bench import BenchRecord, TaskFailed, scaling_sweep, time_task
from .dmath import Dual
from .drift import EmptyReportError, PrecisionReport, drift_report, emit_report_csv
from .gravity import WGS72, GravityModel
from .jacobian import (
    ELEMENT_NAMES,
    StateJacobian,
    finite_difference_jacobian,
    jacobian_batch,
    jacobian_state_wrt_elements,
)
from .kernel import (
    ErrorCode,
    SatInit,
    StateVector,
    epoch_to_julian,
    sgp4_init,
    sgp4_propagate,
)
from .tle import (
    ChecksumError,
    MeanElements,
    TleError,
    TwoLineElement,
    checksum,
    decode_alpha5,
    parse_omm_kvp,
    parse_tle,
    read_tle_file,
    tle_to_elements,
)

__all__ = [
    "BatchResult",
    "BenchRecord",
    "ChecksumError",
    "Dual",
    "ELEMENT_NAMES",
    "EmptyReportError",
    "ErrorCode",
    "GravityModel",
    "GridAllocationError",
    "MeanElements",
    "PrecisionReport",
    "SatBatch",
    "SatInit",
    "StateJacobian",
    "StateVector",
    "StreamAborted",
    "StreamSummary",
    "TaskFailed",
    "TleError",
    "TwoLineElement",
    "WGS72",
    "checksum",
    "decode_alpha5",
    "drift_report",
    "emit_report_csv",
    "epoch_to_julian",
    "finite_difference_jacobian",
    "init_batch",
    "jacobian_batch",
    "jacobian_state_wrt_elements",
    "parse_omm_kvp",
    "parse_tle",
    "partition_work",
    "propagate_batch",
    "propagate_batch_streamed",
    "read_grid_binary",
    "read_tle_file",
    "scaling_sweep",
    "sgp4_init",
    "sgp4_propagate",
    "time_task",
    "tle_to_elements",
    "write_grid_binary",
]

__version__ = "0.1.0"

_ESTIMATOR_NAMES = ("SGP4Propagator", "check_times", "coerce_elements")
__all__ += list(_ESTIMATOR_NAMES)


def __getattr__(name):
    # lazy so the core package works without scikit-learn installed
    if name in _ESTIMATOR_NAMES:
        from . import estimator

        return getattr(estimator, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
