"""Strict fixed-column TLE parsing and OMM key-value ingestion.

Column layout (1-indexed, per the public format definition):

Line 1::

    01      line number '1'
    03-07   catalog number (Alpha-5)
    08      classification
    10-17   international designator
    19-20   epoch year (two digits, pivot 57)
    21-32   epoch day of year, fractional
    34-43   first derivative of mean motion / 2 (rev/day^2)
    45-52   second derivative of mean motion / 6, implied exponent (rev/day^3)
    54-61   B* drag term, implied exponent (1 / Earth radii)
    63      ephemeris type
    65-68   element set number
    69      checksum (mod 10)

Line 2::

    01      line number '2'
    03-07   catalog number (Alpha-5)
    09-16   inclination (deg)
    18-25   RAAN (deg)
    27-33   eccentricity, implied leading decimal point
    35-42   argument of perigee (deg)
    44-51   mean anomaly (deg)
    53-63   mean motion (rev/day)
    64-68   revolution number at epoch
    69      checksum (mod 10)

The epoch day of year is decoded into separate integer and fractional
fields and is never collapsed into a single narrow scalar; summed in
64-bit the two reconstruct the printed field, while the split survives
a round trip through 32-bit storage with sub-10-ms resolution.

ndot and nddot are parsed and stored for fidelity but the propagation
kernel does not consume them (the SGP4 theory ignores them).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

TWOPI = 2.0 * math.pi

# Alpha-5 alphabet: A-Z with I and O excluded.
_ALPHA5_LETTERS = "ABCDEFGHJKLMNPQRSTUVWXYZ"
_ALPHA5_VALUE = {c: 10 + i for i, c in enumerate(_ALPHA5_LETTERS)}


class TleError(ValueError):
    """Raised for malformed TLE or OMM input."""


class ChecksumError(TleError):
    """Raised in strict mode when a line checksum does not match."""


@dataclass(frozen=True)
class TwoLineElement:
    """Raw fields decoded from a TLE record, before unit conversion."""

    catalog_number: int
    classification: str
    intl_designator: str
    epoch_year: int          # full four-digit year
    epoch_day_int: int       # day of year, 1-366
    epoch_day_frac: float    # fraction of day in [0, 1)
    ndot: float              # rev/day^2 (printed value, already /2)
    nddot: float             # rev/day^3 (printed value, already /6)
    bstar: float             # 1 / Earth radii
    element_set_number: int
    inclination_deg: float
    raan_deg: float
    eccentricity: float
    argp_deg: float
    mean_anomaly_deg: float
    mean_motion_revday: float
    rev_number: int
    checksum1: int
    checksum2: int
    warnings: tuple = ()


@dataclass(frozen=True)
class MeanElements:
    """Canonical-unit mean elements: radians, minutes, Earth radii."""

    no_kozai: float          # rad/min
    ecco: float
    inclo: float             # rad
    nodeo: float             # rad
    argpo: float             # rad
    mo: float                # rad
    bstar: float             # 1 / Earth radii
    epoch_year: int
    epoch_day_int: int
    epoch_day_frac: float


def checksum(line: str) -> int:
    """Modulo-10 checksum over columns 1-68: digits count, '-' counts 1."""
    if len(line) < 68:
        raise TleError(f"line too short for checksum: {len(line)} < 68")
    total = 0
    for ch in line[:68]:
        if ch.isdigit():
            total += int(ch)
        elif ch == "-":
            total += 1
    return total % 10


def decode_alpha5(field: str) -> int:
    """Decode a 5-character Alpha-5 catalog number field."""
    field = field.strip() or "0"
    if len(field) > 5:
        raise TleError(f"catalog field too long: {field!r}")
    lead = field[0]
    if lead.isdigit():
        try:
            return int(field)
        except ValueError:
            raise TleError(f"bad catalog number: {field!r}") from None
    if lead in ("I", "O"):
        raise TleError(f"letter {lead!r} is excluded from Alpha-5")
    if lead not in _ALPHA5_VALUE:
        raise TleError(f"bad Alpha-5 leading character: {lead!r}")
    tail = field[1:]
    if not (len(tail) == 4 and tail.isdigit()):
        raise TleError(f"bad Alpha-5 catalog number: {field!r}")
    return _ALPHA5_VALUE[lead] * 10000 + int(tail)


def _implied_exponent(field: str, name: str) -> float:
    """Decode fields like ' 12345-3' meaning 0.12345e-3."""
    field = field.strip()
    if not field:
        return 0.0
    m = re.fullmatch(r"([+-]?)(\d*)([+-]\d?|)", field)
    if m is None:
        raise TleError(f"bad {name} field: {field!r}")
    sign, mantissa, exp = m.groups()
    if not mantissa:
        return 0.0
    value = float(f"{sign}0.{mantissa}")
    if exp and exp not in ("+", "-"):
        value *= 10.0 ** int(exp)
    return value


def _float_field(text: str, name: str) -> float:
    text = text.strip()
    if not text:
        return 0.0
    try:
        return float(text)
    except ValueError:
        raise TleError(f"bad {name} field: {text!r}") from None


def _int_field(text: str, name: str) -> int:
    text = text.strip()
    if not text:
        return 0
    try:
        return int(text)
    except ValueError:
        raise TleError(f"bad {name} field: {text!r}") from None


def _split_epoch(epoch_field: str) -> tuple[int, int, float]:
    """Decode columns 19-32 of line 1 into (year, day_int, day_frac)."""
    yy = _int_field(epoch_field[:2], "epoch year")
    year = 1900 + yy if yy >= 57 else 2000 + yy
    day_text = epoch_field[2:].strip()
    if "." in day_text:
        int_part, frac_part = day_text.split(".", 1)
    else:
        int_part, frac_part = day_text, ""
    day_int = _int_field(int_part, "epoch day")
    day_frac = float("0." + frac_part) if frac_part else 0.0
    if not 1 <= day_int <= 366:
        raise TleError(f"epoch day of year out of range: {day_int}")
    return year, day_int, day_frac


def _prepare_line(line: str, which: int, lenient: bool) -> str:
    if lenient:
        line = line.rstrip("\r\n ").ljust(69)
    if len(line) != 69:
        raise TleError(f"line {which} must be 69 characters, got {len(line)}")
    return line


def parse_tle(line1: str, line2: str, strict: bool = False,
              lenient_length: bool = True) -> TwoLineElement:
    """Decode one TLE record.

    In strict mode a checksum mismatch raises :class:`ChecksumError`;
    otherwise it is recorded on the result's ``warnings`` (public
    catalogues contain known checksum defects).
    """
    line1 = _prepare_line(line1, 1, lenient_length)
    line2 = _prepare_line(line2, 2, lenient_length)
    if line1[0] != "1":
        raise TleError(f"line 1 does not start with '1': {line1[0]!r}")
    if line2[0] != "2":
        raise TleError(f"line 2 does not start with '2': {line2[0]!r}")

    cat1 = decode_alpha5(line1[2:7])
    cat2 = decode_alpha5(line2[2:7])
    if cat1 != cat2:
        raise TleError(f"catalog numbers disagree: {cat1} vs {cat2}")

    warnings = []
    stored1 = _int_field(line1[68], "checksum 1")
    stored2 = _int_field(line2[68], "checksum 2")
    for which, line, stored in ((1, line1, stored1), (2, line2, stored2)):
        computed = checksum(line)
        if computed != stored:
            msg = f"line {which} checksum mismatch: stored {stored}, computed {computed}"
            if strict:
                raise ChecksumError(msg)
            warnings.append(msg)

    year, day_int, day_frac = _split_epoch(line1[18:32])
    ecc_digits = line2[26:33].strip() or "0"
    if not ecc_digits.isdigit():
        raise TleError(f"bad eccentricity field: {line2[26:33]!r}")
    eccentricity = float("0." + ecc_digits.zfill(7))

    return TwoLineElement(
        catalog_number=cat1,
        classification=line1[7],
        intl_designator=line1[9:17].strip(),
        epoch_year=year,
        epoch_day_int=day_int,
        epoch_day_frac=day_frac,
        ndot=_float_field(line1[33:43], "ndot"),
        nddot=_implied_exponent(line1[44:52], "nddot"),
        bstar=_implied_exponent(line1[53:61], "bstar"),
        element_set_number=_int_field(line1[64:68], "element set number"),
        inclination_deg=_float_field(line2[8:16], "inclination"),
        raan_deg=_float_field(line2[17:25], "RAAN"),
        eccentricity=eccentricity,
        argp_deg=_float_field(line2[34:42], "argument of perigee"),
        mean_anomaly_deg=_float_field(line2[43:51], "mean anomaly"),
        mean_motion_revday=_float_field(line2[52:63], "mean motion"),
        rev_number=_int_field(line2[63:68], "rev number"),
        checksum1=stored1,
        checksum2=stored2,
        warnings=tuple(warnings),
    )


def _canonical_elements(mean_motion_revday, eccentricity, inclination_deg,
                        raan_deg, argp_deg, mean_anomaly_deg, bstar,
                        epoch_year, epoch_day_int, epoch_day_frac) -> MeanElements:
    deg2rad = math.pi / 180.0
    return MeanElements(
        no_kozai=mean_motion_revday * TWOPI / 1440.0,
        ecco=eccentricity,
        inclo=inclination_deg * deg2rad,
        nodeo=(raan_deg * deg2rad) % TWOPI,
        argpo=(argp_deg * deg2rad) % TWOPI,
        mo=(mean_anomaly_deg * deg2rad) % TWOPI,
        bstar=bstar,
        epoch_year=epoch_year,
        epoch_day_int=epoch_day_int,
        epoch_day_frac=epoch_day_frac,
    )


def tle_to_elements(tle: TwoLineElement) -> MeanElements:
    """Unit conversion only; epoch fields pass through unchanged."""
    return _canonical_elements(
        tle.mean_motion_revday, tle.eccentricity, tle.inclination_deg,
        tle.raan_deg, tle.argp_deg, tle.mean_anomaly_deg, tle.bstar,
        tle.epoch_year, tle.epoch_day_int, tle.epoch_day_frac,
    )


_OMM_REQUIRED = ("MEAN_MOTION", "ECCENTRICITY", "INCLINATION",
                 "RA_OF_ASC_NODE", "ARG_OF_PERICENTER", "MEAN_ANOMALY",
                 "BSTAR", "EPOCH")

_DAYS_BEFORE_MONTH = (0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334)


def _is_leap(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


def _iso_epoch_to_split(text: str) -> tuple[int, int, float]:
    m = re.fullmatch(
        r"(\d{4})-(\d{2})-(\d{2})[T ](\d{2}):(\d{2}):(\d{2}(?:\.\d+)?)Z?",
        text.strip())
    if m is None:
        raise TleError(f"bad ISO-8601 epoch: {text!r}")
    year, month, day = int(m[1]), int(m[2]), int(m[3])
    hh, mm, ss = int(m[4]), int(m[5]), float(m[6])
    if not 1 <= month <= 12:
        raise TleError(f"bad month in epoch: {text!r}")
    doy = _DAYS_BEFORE_MONTH[month - 1] + day
    if month > 2 and _is_leap(year):
        doy += 1
    frac = (hh * 3600.0 + mm * 60.0 + ss) / 86400.0
    return year, doy, frac


def parse_omm_kvp(text: str) -> MeanElements:
    """Parse OMM key = value text into canonical mean elements.

    The OMM encodes the same element representation as the TLE, so the
    two routes agree bit-for-bit for identical raw values.
    """
    fields: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("COMMENT", 1)[0] if raw.lstrip().startswith("COMMENT") else raw
        if "=" not in line:
            continue
        key, value = line.split("=", 1)
        fields[key.strip()] = value.strip()
    missing = [k for k in _OMM_REQUIRED if k not in fields]
    if missing:
        raise TleError(f"OMM missing mandatory keys: {', '.join(missing)}")
    year, day_int, day_frac = _iso_epoch_to_split(fields["EPOCH"])
    return _canonical_elements(
        _float_field(fields["MEAN_MOTION"], "MEAN_MOTION"),
        _float_field(fields["ECCENTRICITY"], "ECCENTRICITY"),
        _float_field(fields["INCLINATION"], "INCLINATION"),
        _float_field(fields["RA_OF_ASC_NODE"], "RA_OF_ASC_NODE"),
        _float_field(fields["ARG_OF_PERICENTER"], "ARG_OF_PERICENTER"),
        _float_field(fields["MEAN_ANOMALY"], "MEAN_ANOMALY"),
        _float_field(fields["BSTAR"], "BSTAR"),
        year, day_int, day_frac,
    )


def read_tle_file(path, strict: bool = False) -> list[TwoLineElement]:
    """Read concatenated 2- or 3-line TLE records from a file."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    records = []
    i = 0
    while i < len(lines):
        if not lines[i].startswith("1 "):
            i += 1  # name line of a 3-line record
            continue
        if i + 1 >= len(lines) or not lines[i + 1].startswith("2 "):
            raise TleError(
                f"record {len(records)} at line {i + 1}: line 2 missing")
        try:
            records.append(parse_tle(lines[i], lines[i + 1], strict=strict))
        except TleError as exc:
            raise TleError(
                f"record {len(records)} at line {i + 1}: {exc}") from exc
        i += 2
    return records
