"""Shared fixtures: the reference implementation oracle, real TLE
records, and a deterministic synthetic LEO catalogue generator."""

from __future__ import annotations

import importlib.util
import math
import random
from pathlib import Path

import numpy as np
import pytest

from sgp4kit import checksum, parse_tle, tle_to_elements

REFERENCE_PATH = (
    Path(__file__).resolve().parent.parent / "examples" /
    "sgp4_satellite_orbit_propagator_implementation" /
    "r005__brandon-rhodes__python-sgp4__propagation.py")


@pytest.fixture(scope="session")
def reference():
    """Independently written SGP4 implementation used as the oracle."""
    spec = importlib.util.spec_from_file_location("reference_sgp4",
                                                  REFERENCE_PATH)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


class _RefSat:
    """Bare attribute holder for the reference sgp4init."""


@pytest.fixture(scope="session")
def reference_propagate(reference):
    """Callable (elements, tsince) -> (r, v, error) via the oracle."""
    grav = reference.getgravconst("wgs72")

    def run(el, tsince):
        sat = _RefSat()
        reference.sgp4init(grav, "i", 0, 0.0, el.bstar, 0.0, 0.0, el.ecco,
                           el.argpo, el.inclo, el.mo, el.no_kozai, el.nodeo,
                           sat)
        r, v = reference.sgp4(sat, float(tsince))
        return np.array(r, dtype=np.float64), np.array(v, dtype=np.float64), sat.error

    return run


@pytest.fixture(scope="session")
def reference_init(reference):
    """Callable elements -> attribute holder with init constants."""
    grav = reference.getgravconst("wgs72")

    def run(el):
        sat = _RefSat()
        reference.sgp4init(grav, "i", 0, 0.0, el.bstar, 0.0, 0.0, el.ecco,
                           el.argpo, el.inclo, el.mo, el.no_kozai, el.nodeo,
                           sat)
        return sat

    return run


def with_checksums(line1: str, line2: str) -> tuple[str, str]:
    line1 = line1.ljust(68)[:68]
    line2 = line2.ljust(68)[:68]
    return line1 + str(checksum(line1 + "0")), line2 + str(checksum(line2 + "0"))


# Real records spanning ISS, a Starlink bird, a sun-synchronous orbit,
# a Molniya-like high-eccentricity orbit, and a low-perigee decaying
# object (checksums recomputed after transcription).
REAL_TLES = [
    ("ISS",
     "1 25544U 98067A   20344.91667824  .00016717  00000-0  10270-3 0  9000",
     "2 25544  51.6442  21.0000 0001882 345.0000  15.0000 15.49309239  1000"),
    ("STARLINK-1007",
     "1 44713U 19074A   23001.00001157  .00002182  00000-0  16538-3 0  9991",
     "2 44713  53.0541 236.0710 0001291  90.7840 269.3301 15.06391223174712"),
    ("SSO",
     "1 43013U 17073A   23010.50000000  .00000123  00000-0  45000-4 0  9990",
     "2 43013  98.7213 310.1124 0001450  95.2110 264.9230 14.19552408265511"),
    ("ECCENTRIC",
     "1 20813U 90081A   23011.25000000  .00000211  00000-0  10000-3 0  9993",
     "2 20813  62.8041 245.1201 7100000 270.0120  14.5500  2.50612301 99999"),
    ("LOWPERIGEE",
     "1 39999U 14999A   23012.12500000  .00150000  00000-0  25000-2 0  9992",
     "2 39999  96.5000 100.0000 0012000 120.0000 240.2000 16.20000000 12345"),
]


def _near_earth(name, line1, line2):
    el = tle_to_elements(parse_tle(*with_checksums(line1, line2)))
    period_min = 2.0 * math.pi / el.no_kozai
    return period_min < 225.0


@pytest.fixture(scope="session")
def real_elements():
    """Canonical elements for the embedded near-Earth records."""
    out = {}
    for name, l1, l2 in REAL_TLES:
        if _near_earth(name, l1, l2):
            out[name] = tle_to_elements(parse_tle(*with_checksums(l1, l2)))
    return out


def synthetic_tle_lines(index: int, rng: random.Random) -> tuple[str, str]:
    """One forged but format-conformant LEO record."""
    catalog = 10000 + index
    yy = rng.choice([21, 22, 23])
    day = rng.randint(1, 365) + rng.random()
    ndot = rng.uniform(-9e-5, 9e-4)
    bstar_mant = rng.randint(10000, 99999)
    bstar_exp = rng.randint(-5, -3)
    incl = rng.uniform(20.0, 110.0)
    raan = rng.uniform(0.0, 360.0)
    ecc = rng.randint(1, 200000)  # implied 0.0000001 .. 0.02
    argp = rng.uniform(0.0, 360.0)
    ma = rng.uniform(0.0, 360.0)
    mm = rng.uniform(11.3, 16.2)  # safely near-Earth
    rev = rng.randint(1, 99999)
    ndot_field = f"{ndot: .8f}".replace("0.", ".")  # 10 columns, no lead zero
    l1 = (f"1 {catalog:05d}U 98067A   {yy:02d}{day:012.8f} "
          + ndot_field
          + f"  00000-0  {bstar_mant:05d}{bstar_exp:+d} 0  999")
    l2 = (f"2 {catalog:05d} {incl:8.4f} {raan:8.4f} {ecc:07d} {argp:8.4f} "
          f"{ma:8.4f} {mm:11.8f}{rev:5d}")
    return with_checksums(l1, l2)


@pytest.fixture(scope="session")
def synthetic_catalogue():
    """Deterministic forged catalogue of 1200 parseable LEO records."""
    rng = random.Random(20230101)
    return [synthetic_tle_lines(i, rng) for i in range(1200)]


def reference_parse(line1: str, line2: str) -> dict:
    """Independent field extraction, written directly from the column
    layout with none of the package's helper code."""
    def implied(text):
        text = text.strip()
        if not text or set(text) <= {"+", "-", "0"}:
            sign = -1.0 if text.startswith("-") else 1.0
            return sign * 0.0
        mantissa = text[:-2] if text[-2] in "+-" else text
        exponent = int(text[-2:]) if text[-2] in "+-" else 0
        neg = mantissa.startswith("-")
        digits = mantissa.lstrip("+-")
        value = int(digits) / 10.0 ** len(digits)
        return (-value if neg else value) * 10.0 ** exponent

    def alpha5(text):
        text = text.strip()
        if text[0].isalpha():
            letters = "ABCDEFGHJKLMNPQRSTUVWXYZ"
            return (letters.index(text[0]) + 10) * 10000 + int(text[1:])
        return int(text)

    def line_checksum(line):
        total = 0
        for ch in line[:68]:
            if ch in "0123456789":
                total += int(ch)
            if ch == "-":
                total += 1
        return total % 10

    yy = int(line1[18:20])
    epoch_day = line1[20:32].strip()
    whole, _, frac = epoch_day.partition(".")
    return {
        "catalog": alpha5(line1[2:7]),
        "epoch_year": (1900 if yy >= 57 else 2000) + yy,
        "epoch_day_int": int(whole),
        "epoch_day_frac": float("0." + frac) if frac else 0.0,
        "ndot": float(line1[33:43]),
        "nddot": implied(line1[44:52]),
        "bstar": implied(line1[53:61]),
        "checksum1_ok": line_checksum(line1) == int(line1[68]),
        "inclination": float(line2[8:16]),
        "raan": float(line2[17:25]),
        "eccentricity": int(line2[26:33]) / 1.0e7,
        "argp": float(line2[34:42]),
        "mean_anomaly": float(line2[43:51]),
        "mean_motion": float(line2[52:63]),
        "checksum2_ok": line_checksum(line2) == int(line2[68]),
    }


@pytest.fixture(scope="session")
def leo_corpus(synthetic_catalogue):
    """120 canonical element sets for drift and batch studies."""
    return [tle_to_elements(parse_tle(l1, l2))
            for l1, l2 in synthetic_catalogue[:120]]
