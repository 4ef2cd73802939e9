"""Geopotential constant sets used by the propagation kernel.

Only WGS72 is built in; alternates can be supplied as plain
:class:`GravityModel` values without code changes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class GravityModel:
    """Earth constants in the canonical units of the SGP theory.

    ``xke`` is sqrt(GM) expressed in (Earth radii)^1.5 per minute and
    ``tumin`` is its reciprocal, so ``xke * tumin == 1`` up to rounding.
    """

    mu: float               # km^3 / s^2
    radius_earth_km: float  # km
    xke: float              # (Earth radii)^1.5 / min
    tumin: float            # min per canonical time unit
    j2: float
    j3: float
    j4: float
    j3oj2: float


def _wgs72() -> GravityModel:
    mu = 398600.8
    radius = 6378.135
    xke = 60.0 / math.sqrt(radius * radius * radius / mu)
    j2 = 0.001082616
    j3 = -0.00000253881
    j4 = -0.00000165597
    return GravityModel(
        mu=mu,
        radius_earth_km=radius,
        xke=xke,
        tumin=1.0 / xke,
        j2=j2,
        j3=j3,
        j4=j4,
        j3oj2=j3 / j2,
    )


WGS72 = _wgs72()
