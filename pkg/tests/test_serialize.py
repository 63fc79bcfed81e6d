import json

import pytest
from hypothesis import given, strategies as st

from ramforge import serialize as ser
from ramforge.errors import INFINITE_AT_PRECISION, SchemaError, ValidationError
from ramforge.herbrand import phi_from_filtration, synthetic_filtration
from ramforge.lubintate import FrobeniusSeries, lt_group
from ramforge.nottingham import FiniteFiltration, NottElem, ram_sequence
from ramforge.ring import FiniteField, make_ring
from ramforge.series import BiSeries, Series

from conftest import TEST_RINGS


def bytes_round_trip(doc, decode, encode):
    text = ser.dumps(doc)
    again = ser.dumps(encode(decode(json.loads(text))))
    assert again == text
    return text


def test_ring_round_trip():
    R = make_ring(2, 1, 2, prec=16)
    doc = ser.ring_to_json(R)
    assert doc == {"p": 2, "f": 1, "e": 2, "inertial_poly": [1], "eisenstein_poly": [-2, 0, 1], "prec": 16}
    assert ser.ring_from_json(doc) == R


@given(st.sampled_from(TEST_RINGS), st.lists(st.integers(-10 ** 6, 10 ** 6), min_size=1, max_size=12),
       st.lists(st.integers(1, 12), min_size=12, max_size=12))
def test_ok_series_round_trip_keeps_precision(spec, coeffs, precs):
    R = make_ring(*spec, prec=12)
    s = Series.from_coeffs(R, coeffs, 12)
    s = Series(R, [s._c[0]] + [R._canon(c, kp) for c, kp in zip(s._c[1:], precs)], [12] + precs)
    doc = ser.series_to_json(s)
    back = ser.series_from_json(doc)
    assert back.prec[1:] == s.prec[1:] and back._c[1:] == s._c[1:]
    bytes_round_trip(doc, ser.series_from_json, ser.series_to_json)


def test_fq_series_round_trip():
    F = FiniteField(2, 3)
    s = Series.from_coeffs(F, [1, [0, 1, 1], 0, [1, 1, 1]], 6)
    bytes_round_trip(ser.series_to_json(s), ser.series_from_json, ser.series_to_json)


def test_group_round_trip():
    R = make_ring(2, 2, 1, prec=8)
    G = lt_group(FrobeniusSeries.canonical(R), 5, 8)
    bytes_round_trip(ser.group_to_json(G), ser.group_from_json, ser.group_to_json)
    back = ser.group_from_json(ser.group_to_json(G))
    assert back.F == G.F and back.frob == G.frob


def test_filtration_and_pl_round_trip():
    filt = FiniteFiltration(3, (3, 7, INFINITE_AT_PRECISION), (1, 2, 4, 8), 8)
    doc = ser.filtration_to_json(filt)
    assert doc["breaks"][-1] == "INFINITE_AT_PRECISION"
    assert ser.filtration_from_json(doc) == filt
    pl = phi_from_filtration(synthetic_filtration(3, 2, 3))
    doc = bytes_round_trip(ser.pl_to_json(pl), ser.pl_from_json, ser.pl_to_json)
    assert "[1,3]" in doc


def test_profile_values():
    prof = ram_sequence(NottElem.from_coeffs(FiniteField(2), [1, 1], 20), 4)
    doc = ser.profile_to_json(prof)
    assert ser.profile_values_from_json(doc) == prof.values


def test_malformed_coefficient_names_index():
    R = make_ring(2, 2, 1, prec=6)
    doc = ser.series_to_json(Series.from_coeffs(R, [1, 2, 3, 4, 5], 5))
    doc["coeffs"][3] = [[1]]
    with pytest.raises(SchemaError, match=r"\$\.coeffs\[3\]"):
        ser.series_from_json(doc)


@pytest.mark.parametrize("mutate,where", [
    (lambda d: d.pop("format"), r"\$\.format"),
    (lambda d: d.update(kind="bogus"), r"\$\.kind"),
    (lambda d: d["ring"].pop("p"), r"\$\.ring\.p"),
    (lambda d: d.update(trunc="3"), r"\$\.trunc"),
    (lambda d: d["precs"].__setitem__(0, "x"), r"\$\.precs"),
])
def test_schema_paths(mutate, where):
    doc = ser.series_to_json(Series.from_coeffs(make_ring(3, prec=6), [1, 2], 2))
    mutate(doc)
    with pytest.raises(SchemaError, match=where):
        ser.series_from_json(doc)


def test_biseries_constant_term_rejected():
    R = make_ring(2, prec=4)
    doc = ser.biseries_to_json(BiSeries(R, 2, {(1, 0): (1,), (0, 1): (1,)}))
    doc["coeffs"][0][0] = [[1]]
    with pytest.raises(SchemaError, match=r"coeffs\[0\]\[0\]"):
        ser.biseries_from_json(doc)


def test_atomic_write(tmp_path):
    target = tmp_path / "out.json"
    ser.write_atomic(str(target), "{}\n")
    ser.write_atomic(str(target), '{"a":1}\n')
    assert target.read_text() == '{"a":1}\n'
    assert [p.name for p in tmp_path.iterdir()] == ["out.json"]


def test_atomic_write_creates_folder_and_reports_failures(tmp_path):
    ser.write_atomic(str(tmp_path / "a" / "b" / "out.json"), "{}\n")
    assert (tmp_path / "a" / "b" / "out.json").read_text() == "{}\n"
    (tmp_path / "file").write_text("")
    with pytest.raises(ValidationError):
        ser.write_atomic(str(tmp_path / "file" / "out.json"), "{}\n")
