"""Scikit-learn style front door for batch propagation.

``fit`` ingests a satellite catalogue and precomputes the per-satellite
propagation constants; ``transform`` maps an array of minutes-since-
epoch offsets to the dense state grid. This keeps the propagator
composable with pipeline tooling that speaks the estimator protocol.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .batch import BatchResult, init_batch, propagate_batch
from .gravity import WGS72, GravityModel
from .tle import MeanElements, TwoLineElement, parse_tle, tle_to_elements


def check_times(times) -> np.ndarray:
    """Validate a 1-D finite array of minutes since epoch."""
    times = np.asarray(times, dtype=np.float64)
    if times.ndim == 0:
        times = times.reshape(1)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-D array-like")
    if not np.isfinite(times).all():
        raise ValueError("times must be finite")
    return times


def coerce_elements(X) -> list[MeanElements]:
    """Accept TLE line pairs, parsed TLEs, or canonical elements."""
    elements = []
    for i, item in enumerate(X):
        if isinstance(item, MeanElements):
            elements.append(item)
        elif isinstance(item, TwoLineElement):
            elements.append(tle_to_elements(item))
        elif isinstance(item, (tuple, list)) and len(item) == 2:
            elements.append(tle_to_elements(parse_tle(item[0], item[1])))
        else:
            raise TypeError(
                f"satellite {i}: expected MeanElements, TwoLineElement, or "
                f"a (line1, line2) pair, got {type(item).__name__}")
    if not elements:
        raise ValueError("no satellites supplied")
    return elements


class SGP4Propagator(BaseEstimator, TransformerMixin):
    """Propagate a fitted catalogue to arbitrary time offsets.

    Parameters
    ----------
    precision : 32 or 64
    workers : worker threads for the batch engine (None = serial)
    gravity : geopotential constant set (WGS72 by default)
    """

    def __init__(self, precision: int = 64, workers: int | None = None,
                 gravity: GravityModel = WGS72):
        self.precision = precision
        self.workers = workers
        self.gravity = gravity

    def fit(self, X, y=None):
        if self.precision not in (32, 64):
            raise ValueError(f"precision must be 32 or 64, got {self.precision}")
        self.elements_ = coerce_elements(X)
        self.batch_ = init_batch(self.elements_, self.gravity, self.precision)
        self.n_satellites_ = self.batch_.n
        return self

    def _check_fitted(self):
        if not hasattr(self, "batch_"):
            raise NotFittedError(
                "This SGP4Propagator instance is not fitted yet; "
                "call fit with a satellite catalogue first.")

    def propagate(self, times) -> BatchResult:
        """Full grid result with separate value and error planes."""
        self._check_fitted()
        return propagate_batch(self.batch_, check_times(times),
                               workers=self.workers)

    def transform(self, X) -> np.ndarray:
        """Array of shape (n_satellites, n_times, 7).

        The last axis is rx, ry, rz (km), vx, vy, vz (km/s) and the
        per-cell error code.
        """
        result = self.propagate(X)
        grid = np.concatenate(
            [result.r.astype(np.float64), result.v.astype(np.float64),
             result.error[..., None].astype(np.float64)], axis=-1)
        return grid

    def predict(self, X) -> np.ndarray:
        return self.transform(X)
