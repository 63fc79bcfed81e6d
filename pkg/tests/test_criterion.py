import math
from fractions import Fraction
from functools import lru_cache

import pytest
from hypothesis import given, strategies as st

from ramforge.criterion import (CHAR_P_INDICATED, CHAR_ZERO_CONSISTENT, closed_form_predict, findin_predict,
                                height, lower_bound_check, lt_ram_profile, predict_in, ratio_check, sen_check)
from ramforge.errors import HypothesisError, NoMatchingM, NotPPower, NotStable, TooFewEntries
from ramforge.lubintate import FrobeniusSeries, lt_group
from ramforge.nottingham import NottElem, ram_sequence
from ramforge.ring import FiniteField, make_ring
from ramforge.series import Series

from conftest import TEST_RINGS


@lru_cache(maxsize=None)
def group(spec):
    R = make_ring(*spec, prec=40)
    return lt_group(FrobeniusSeries.canonical(R), R.q + 1, 8)


def test_height_examples():
    Z2 = make_ring(2, prec=16)
    assert height(Series.from_coeffs(Z2, [2, 1], 6)).value == 1
    assert height(Series.from_coeffs(Z2, [4, 1], 6)).value == Fraction(1, 2)
    for spec in TEST_RINGS:
        R = make_ring(*spec, prec=12)
        g = FrobeniusSeries.canonical(R).series(R.q + 2)
        assert height(g).value == R.e * R.f == R.d
    with pytest.raises(NotStable):
        height(Series.from_coeffs(Z2, [3, 1], 4))
    with pytest.raises(NotPPower):
        height(Series.from_coeffs(Z2, [2, 0, 1], 4))


def test_sen_examples():
    assert sen_check((3, 7, 15), 2)
    assert sen_check((1, 3, 15), 2)
    assert not sen_check((1, 2), 2)
    with pytest.raises(TooFewEntries):
        sen_check((3,), 2)


def test_ratio_examples():
    rep = ratio_check((3, 7, 15, 31), 1, 2)
    assert rep.kappa_found == 0 and rep.verdict == CHAR_ZERO_CONSISTENT and rep.ratio_values == (2, 2)
    rep = ratio_check((1, 3, 15, 255), 1, 2)
    assert rep.kappa_found is None and rep.verdict == CHAR_P_INDICATED
    assert rep.ratio_values == (6, 20)
    rep = ratio_check((15, 63, 255), 2, 2)
    assert rep.kappa_found == 0 and rep.ratio_values == (4,)
    with pytest.raises(TooFewEntries):
        ratio_check((3, 7), 1, 2)


def test_closed_form_examples():
    assert closed_form_predict(3, 7, 1, 2, 3) == 31
    assert closed_form_predict(3, 7, 1, 2, 0) == 3
    assert closed_form_predict(15, 63, 2, 2, 2) == 255


def test_predict_in_examples():
    assert predict_in(2, 2, make_ring(2)) == 15
    assert predict_in(1, 1, make_ring(3)) == 8
    assert predict_in(3, 0, make_ring(2, 2, 1)) == 63
    with pytest.raises(HypothesisError):
        predict_in(1, 1, make_ring(2))


def test_predict_in_matches_binomial_profile():
    # reduction of (1+x)^4 - 1 over F_3 is x + x^3 + ... with i_1 from (1+x)^12 - 1
    F3 = FiniteField(3)
    D = 40
    sigma = NottElem.from_coeffs(F3, [math.comb(4, k) % 3 for k in range(1, D + 1)], D)
    assert ram_sequence(sigma, 1).values[1] == predict_in(1, 1, make_ring(3))


def test_findin_examples():
    G = group((2, 1, 1))
    R = G.ring
    g4, g2, u5 = G.endo(R(4), 20), G.endo(R(2), 20), G.endo(R(5), 20)
    with pytest.raises(NoMatchingM):
        findin_predict(g4, u5, 1)
    assert findin_predict(g4, u5, 2) == 15
    assert findin_predict(g2, u5, 1) == 7


def test_negative_control_x_plus_x2():
    F2 = FiniteField(2)
    prof = ram_sequence(NottElem.from_coeffs(F2, [1, 1], 300), 3)
    assert prof.values == (1, 3, 15, 255)
    rep = ratio_check(prof, 1)
    assert rep.verdict == CHAR_P_INDICATED and rep.ratio_values == (6, 20)


@pytest.mark.parametrize("spec,ell", [((2, 1, 1), 2), ((2, 1, 1), 3), ((3, 1, 1), 1), ((2, 2, 1), 2)])
def test_lubin_tate_profiles(spec, ell):
    G = group(spec)
    R = G.ring
    alpha = 1 + R.pi() ** ell
    prof = lt_ram_profile(G, alpha, 2)
    assert prof.values == tuple(predict_in(ell, n, R) for n in range(3))
    assert sen_check(prof) and lower_bound_check(prof)
    rep = ratio_check(prof, R.d)
    assert rep.kappa_found == 0 and rep.verdict == CHAR_ZERO_CONSISTENT
    assert rep.ratio_values == (R.p ** R.d,)
    v = prof.values
    assert closed_form_predict(v[0], v[1], R.d, R.p, 2) == v[2]


@given(st.integers(1, 200).map(lambda n: 4 * n + 1))
def test_binomial_profiles_criteria(alpha):
    F2 = FiniteField(2)
    D = 2 ** 6
    sigma = NottElem.from_coeffs(F2, [1 if k & alpha == k else 0 for k in range(1, D + 1)], D)
    vals = ram_sequence(sigma, 3).finite_prefix()
    if len(vals) >= 2:
        assert sen_check(vals, 2)
    assert lower_bound_check(vals, 2)
    if len(vals) >= 3:
        assert ratio_check(vals, 1, 2).verdict == CHAR_ZERO_CONSISTENT


@given(st.integers(0, 50), st.integers(1, 50), st.sampled_from([2, 3]), st.integers(1, 3), st.integers(0, 5))
def test_closed_form_matches_geometric_sequence(i0, step, p, d, n):
    seq = [i0]
    for k in range(n):
        seq.append(seq[-1] + step * p ** (d * k))
    assert closed_form_predict(i0, i0 + step, d, p, n) == seq[n]
