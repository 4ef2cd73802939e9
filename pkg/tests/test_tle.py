import math

import pytest
from hypothesis import given, strategies as st

from sgp4kit import (
    ChecksumError,
    TleError,
    checksum,
    decode_alpha5,
    parse_omm_kvp,
    parse_tle,
    read_tle_file,
    tle_to_elements,
)
from sgp4kit.tle import _implied_exponent, _split_epoch

from conftest import REAL_TLES, reference_parse, with_checksums

ISS_L1, ISS_L2 = with_checksums(REAL_TLES[0][1], REAL_TLES[0][2])


class TestChecksum:
    def test_known_line(self):
        assert checksum(ISS_L1) == int(ISS_L1[68])

    def test_minus_counts_one(self):
        base = " " * 68
        with_minus = "-" + " " * 67
        assert checksum(base) == 0
        assert checksum(with_minus) == 1

    def test_letters_ignored(self):
        assert checksum("A" * 68) == 0

    def test_short_line_rejected(self):
        with pytest.raises(TleError):
            checksum("1 25544")

    @given(st.text(alphabet="0123456789 -ABCU.", min_size=68, max_size=68))
    def test_range_and_determinism(self, line):
        value = checksum(line)
        assert 0 <= value <= 9
        assert value == checksum(line)


class TestAlpha5:
    def test_plain_digits(self):
        assert decode_alpha5("25544") == 25544

    def test_space_padded(self):
        assert decode_alpha5("    7") == 7

    def test_first_letter_value(self):
        # 'A' maps to 10, so A0000 is 100000
        assert decode_alpha5("A0000") == 100000

    def test_skips_i_and_o(self):
        # letters after H jump past I; J maps to 18
        assert decode_alpha5("J0001") == 180001
        assert decode_alpha5("Z9999") == 339999

    @pytest.mark.parametrize("bad", ["I0000", "O1234"])
    def test_excluded_letters(self, bad):
        with pytest.raises(TleError):
            decode_alpha5(bad)

    def test_bad_tail(self):
        with pytest.raises(TleError):
            decode_alpha5("A12B4")

    @given(st.integers(min_value=0, max_value=339999))
    def test_round_trip(self, number):
        if number < 100000:
            field = f"{number:5d}"
        else:
            letters = "ABCDEFGHJKLMNPQRSTUVWXYZ"
            field = letters[number // 10000 - 10] + f"{number % 10000:04d}"
        assert decode_alpha5(field) == number


class TestImpliedExponent:
    @pytest.mark.parametrize("field,value", [
        (" 10270-3", 0.10270e-3),
        ("-11606-4", -0.11606e-4),
        (" 00000-0", 0.0),
        (" 00000+0", 0.0),
        ("        ", 0.0),
        (" 13844-3", 0.13844e-3),
    ])
    def test_known_fields(self, field, value):
        assert _implied_exponent(field, "test") == pytest.approx(value, rel=0, abs=0)

    def test_garbage_rejected(self):
        with pytest.raises(TleError):
            _implied_exponent("1.2e-3x", "test")


class TestEpochSplit:
    def test_pivot_57(self):
        assert _split_epoch("57001.00000000")[0] == 1957
        assert _split_epoch("56001.00000000")[0] == 2056
        assert _split_epoch("99365.25000000")[0] == 1999
        assert _split_epoch("00001.50000000")[0] == 2000

    def test_split_fields(self):
        year, day, frac = _split_epoch("20344.91667824")
        assert (year, day) == (2020, 344)
        assert frac == pytest.approx(0.91667824, abs=0)

    def test_sum_reconstructs_printed_field(self):
        _, day, frac = _split_epoch("20344.91667824")
        assert day + frac == pytest.approx(344.91667824, rel=1e-15)

    def test_day_out_of_range(self):
        with pytest.raises(TleError):
            _split_epoch("20367.00000000")
        with pytest.raises(TleError):
            _split_epoch("20000.50000000")

    def test_fraction_survives_float32(self):
        import numpy as np
        _, day, frac = _split_epoch("20344.91667824")
        # storing the fraction alone in 32-bit keeps sub-10-ms resolution
        err_s = abs(float(np.float32(frac)) - frac) * 86400.0
        assert err_s < 0.01


class TestParseTle:
    def test_real_records(self):
        for name, l1, l2 in REAL_TLES:
            tle = parse_tle(*with_checksums(l1, l2), strict=True)
            ref = reference_parse(*with_checksums(l1, l2))
            assert tle.catalog_number == ref["catalog"]
            assert tle.eccentricity == ref["eccentricity"]
            assert tle.mean_motion_revday == ref["mean_motion"]

    def test_checksum_lenient_records_warning(self):
        bad = ISS_L1[:68] + str((int(ISS_L1[68]) + 1) % 10)
        tle = parse_tle(bad, ISS_L2)
        assert any("checksum" in w for w in tle.warnings)

    def test_checksum_strict_raises(self):
        bad = ISS_L1[:68] + str((int(ISS_L1[68]) + 1) % 10)
        with pytest.raises(ChecksumError):
            parse_tle(bad, ISS_L2, strict=True)

    def test_line_numbers_enforced(self):
        with pytest.raises(TleError):
            parse_tle(ISS_L2, ISS_L1)

    def test_catalog_agreement_enforced(self):
        other = "2 00001" + ISS_L2[7:]
        with pytest.raises(TleError):
            parse_tle(ISS_L1, other)

    def test_short_line_rejected_when_not_lenient(self):
        with pytest.raises(TleError):
            parse_tle(ISS_L1[:60], ISS_L2, lenient_length=False)

    def test_elements_in_range(self):
        el = tle_to_elements(parse_tle(ISS_L1, ISS_L2))
        assert 0.0 < el.no_kozai < 2.0 * math.pi / 225.0 * 225.0
        assert 0.0 <= el.ecco < 1.0
        for angle in (el.nodeo, el.argpo, el.mo):
            assert 0.0 <= angle < 2.0 * math.pi

    def test_mean_motion_conversion(self):
        el = tle_to_elements(parse_tle(ISS_L1, ISS_L2))
        assert el.no_kozai == pytest.approx(
            15.49309239 * 2.0 * math.pi / 1440.0, rel=1e-15)


class TestParserConformance:
    def test_synthetic_catalogue_zero_mismatches(self, synthetic_catalogue):
        assert len(synthetic_catalogue) >= 1000
        mismatches = 0
        for l1, l2 in synthetic_catalogue:
            tle = parse_tle(l1, l2, strict=True)
            ref = reference_parse(l1, l2)
            assert ref["checksum1_ok"] and ref["checksum2_ok"]
            pairs = [
                (tle.catalog_number, ref["catalog"]),
                (tle.epoch_year, ref["epoch_year"]),
                (tle.epoch_day_int, ref["epoch_day_int"]),
                (tle.epoch_day_frac, ref["epoch_day_frac"]),
                (tle.ndot, ref["ndot"]),
                (tle.nddot, ref["nddot"]),
                (tle.bstar, ref["bstar"]),
                (tle.inclination_deg, ref["inclination"]),
                (tle.raan_deg, ref["raan"]),
                (tle.eccentricity, ref["eccentricity"]),
                (tle.argp_deg, ref["argp"]),
                (tle.mean_anomaly_deg, ref["mean_anomaly"]),
                (tle.mean_motion_revday, ref["mean_motion"]),
            ]
            mismatches += sum(1 for a, b in pairs if a != b)
        assert mismatches == 0


class TestOmm:
    OMM = """\
COMMENT generated for parser agreement
OBJECT_NAME = ISS (ZARYA)
EPOCH = 2020-12-09T22:00:00.999936
MEAN_MOTION = 15.49309239
ECCENTRICITY = 0.0001882
INCLINATION = 51.6442
RA_OF_ASC_NODE = 21.0
ARG_OF_PERICENTER = 345.0
MEAN_ANOMALY = 15.0
BSTAR = 0.00010270
"""

    def test_matches_tle_route_bitwise(self):
        from_tle = tle_to_elements(parse_tle(ISS_L1, ISS_L2))
        from_omm = parse_omm_kvp(self.OMM)
        assert from_omm.no_kozai == from_tle.no_kozai
        assert from_omm.ecco == from_tle.ecco
        assert from_omm.inclo == from_tle.inclo
        assert from_omm.nodeo == from_tle.nodeo
        assert from_omm.argpo == from_tle.argpo
        assert from_omm.mo == from_tle.mo
        assert from_omm.bstar == from_tle.bstar
        assert (from_omm.epoch_year, from_omm.epoch_day_int) == (2020, 344)
        # epoch fraction goes through a seconds conversion; sub-ms agreement
        assert from_omm.epoch_day_frac == pytest.approx(
            from_tle.epoch_day_frac, abs=1.0e-8)

    def test_missing_key_reported(self):
        broken = self.OMM.replace("BSTAR = 0.00010270\n", "")
        with pytest.raises(TleError, match="BSTAR"):
            parse_omm_kvp(broken)

    def test_bad_epoch_rejected(self):
        broken = self.OMM.replace("2020-12-09T22:00:00.999936", "yesterday")
        with pytest.raises(TleError):
            parse_omm_kvp(broken)


class TestReadTleFile:
    def test_two_and_three_line_records(self, tmp_path):
        path = tmp_path / "mixed.tle"
        lines = []
        for name, l1, l2 in REAL_TLES[:3]:
            l1, l2 = with_checksums(l1, l2)
            lines += [name, l1, l2]
        l1, l2 = with_checksums(*REAL_TLES[3][1:])
        lines += [l1, l2]
        path.write_text("\n".join(lines) + "\n")
        records = read_tle_file(path)
        assert [r.catalog_number for r in records] == [25544, 44713, 43013, 20813]

    def test_missing_second_line(self, tmp_path):
        path = tmp_path / "broken.tle"
        path.write_text(ISS_L1 + "\n")
        with pytest.raises(TleError):
            read_tle_file(path)

    def test_parse_failure_names_the_record(self, tmp_path):
        l1, l2 = with_checksums(*REAL_TLES[0][1:])
        bad1, bad2 = with_checksums(*REAL_TLES[1][1:])
        bad2 = "2 !" + bad2[3:]
        path = tmp_path / "partial.tle"
        path.write_text("\n".join([l1, l2, bad1, bad2]) + "\n")
        with pytest.raises(TleError, match="record 1 at line 3"):
            read_tle_file(path)
