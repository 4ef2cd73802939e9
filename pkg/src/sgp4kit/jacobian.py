"""Forward-mode Jacobians of the propagated state w.r.t. mean elements.

Dual numbers are threaded through the full initialization plus
propagation pipeline (the initialization constants depend on the
elements and are differentiated through), producing the exact 6x7
state transition matrix in one evaluation. With 7 inputs and 6 outputs
forward mode needs no tape and a single pass.

A central finite-difference evaluator is provided as the independent
cross-check; it is intended for tests and validation reports, not
production use.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .dmath import Dual
from .gravity import WGS72, GravityModel
from .kernel import sgp4_init, sgp4_propagate
from .tle import MeanElements

ELEMENT_NAMES = ("no_kozai", "ecco", "inclo", "nodeo", "argpo", "mo", "bstar")
STATE_NAMES = ("rx", "ry", "rz", "vx", "vy", "vz")

FD_ABS_FLOOR = 1.0e-9
# bstar and near-circular eccentricities sit near 1e-4 or below, where
# a 1e-9 step leaves the central difference roundoff-limited at ~1e-3
# relative. The state is nearly linear in bstar over LEO-scale drag, so
# a large bstar step costs no truncation while dividing the roundoff.
FD_FLOORS = {"bstar": 1.0e-4, "ecco": 1.0e-8}


@dataclass(frozen=True)
class StateJacobian:
    """6x7 matrix: rows rx..vz, columns no_kozai..bstar.

    Units are km (or km/s) per element unit. ``valid`` is False when
    the underlying propagation flagged a nonzero error code.
    """

    matrix: np.ndarray
    error_code: int
    valid: bool


def _seeded_elements(elems: MeanElements) -> MeanElements:
    k = len(ELEMENT_NAMES)
    seeded = {name: Dual.seed(getattr(elems, name), i, k)
              for i, name in enumerate(ELEMENT_NAMES)}
    return replace(elems, **seeded)


def jacobian_state_wrt_elements(elems: MeanElements,
                                grav: GravityModel = WGS72,
                                tsince_min: float = 0.0) -> StateJacobian:
    """Exact forward-mode Jacobian at 64-bit precision."""
    init = sgp4_init(_seeded_elements(elems), grav)
    state = sgp4_propagate(init, float(tsince_min))
    components = tuple(state.r) + tuple(state.v)
    matrix = np.stack([c.tan for c in components])  # (6, 7) + value shape
    error = int(np.max(state.error_code))
    return StateJacobian(matrix=matrix.reshape(matrix.shape[:2]),
                         error_code=error, valid=error == 0)


def jacobian_batch(element_list, grav: GravityModel = WGS72,
                   tsince_min: float = 0.0) -> np.ndarray:
    """Jacobians for many satellites in one dual-valued pass, (N, 6, 7)."""
    k = len(ELEMENT_NAMES)
    arrays = {name: np.array([getattr(e, name) for e in element_list],
                             dtype=np.float64)
              for name in ELEMENT_NAMES}
    seeded = {name: Dual.seed(arrays[name], i, k)
              for i, name in enumerate(ELEMENT_NAMES)}
    elems = replace(element_list[0], **seeded)
    init = sgp4_init(elems, grav)
    state = sgp4_propagate(init, float(tsince_min))
    components = tuple(state.r) + tuple(state.v)
    return np.stack([c.tan for c in components]).transpose(2, 0, 1)


def finite_difference_jacobian(elems: MeanElements,
                               grav: GravityModel = WGS72,
                               tsince_min: float = 0.0,
                               rel_step: float = 1.0e-6) -> StateJacobian:
    """Central-difference oracle for the forward-mode Jacobian."""
    matrix = np.empty((6, len(ELEMENT_NAMES)))
    worst_error = 0
    for j, name in enumerate(ELEMENT_NAMES):
        x = float(getattr(elems, name))
        floor = FD_FLOORS.get(name, FD_ABS_FLOOR)
        if x == 0.0:
            warnings.warn(
                f"element {name} is zero; using absolute step {floor:g}",
                RuntimeWarning, stacklevel=2)
        h = max(rel_step * abs(x), floor)
        hi = _state_at(replace(elems, **{name: x + h}), grav, tsince_min)
        lo = _state_at(replace(elems, **{name: x - h}), grav, tsince_min)
        matrix[:, j] = (hi[0] - lo[0]) / (2.0 * h)
        worst_error = max(worst_error, hi[1], lo[1])
    return StateJacobian(matrix=matrix, error_code=worst_error,
                         valid=worst_error == 0)


def _state_at(elems, grav, tsince_min):
    init = sgp4_init(elems, grav)
    state = sgp4_propagate(init, float(tsince_min))
    return (np.concatenate([np.atleast_1d(np.asarray(state.r)).ravel(),
                            np.atleast_1d(np.asarray(state.v)).ravel()]),
            int(np.max(state.error_code)))
