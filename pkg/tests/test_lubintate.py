import math
from functools import lru_cache

import pytest
from hypothesis import given, strategies as st

from ramforge.errors import NotFrobenius
from ramforge.lubintate import (FrobeniusSeries, frobenius_factor, group_reduce, lazard_check, lt_endo,
                                lt_group, lt_solve, multiplicative_frobenius, reduce_endo)
from ramforge.ring import FiniteField, make_ring
from ramforge.series import BiSeries, Series, bi_substitute, s_compose, s_derivative, s_reduce, wideg

from conftest import TEST_RINGS

PREC = 8
# elements are taken as exact representatives, so the ring carries
# enough digits that products of small test values never wrap
RING_PREC = 40


@lru_cache(maxsize=None)
def group(spec, T=None):
    R = make_ring(*spec, prec=RING_PREC)
    return lt_group(FrobeniusSeries.canonical(R), R.q + 3 if T is None else T, PREC)


def binomial_series(R, a, D):
    """(1+x)^a - 1 as a series, a >= 0."""
    return Series.from_coeffs(R, [math.comb(a, k) for k in range(1, D + 1)], D)


def test_multiplicative_group_law():
    G = group((2, 1, 1), 7)
    R = G.ring
    expect = BiSeries(R, 7, {(1, 0): (1,), (0, 1): (1,), (1, 1): (1,)})
    assert G.F == expect
    assert multiplicative_frobenius(R) == G.frob


def test_identity_and_negation_solves():
    R = make_ring(3, prec=PREC)
    f = FrobeniusSeries.canonical(R)
    assert lt_solve(1, f, f, 10, PREC) == Series.x(R, 10).with_prec(PREC)
    assert lt_solve(-1, f, f, 10, PREC) == Series.from_coeffs(R, [-1], 10).with_prec(PREC)


def test_frobenius_validation():
    R = make_ring(2, prec=PREC)
    with pytest.raises(NotFrobenius):
        FrobeniusSeries(R, {1: 1, 2: 1})
    with pytest.raises(NotFrobenius):
        FrobeniusSeries(R, {1: 2, 2: 3, 3: 1})


def test_endo_examples():
    G = group((2, 1, 1))
    R = G.ring
    assert lt_endo(G, R(3), 8) == binomial_series(R, 3, 8)
    assert lt_endo(G, R(1), 8) == Series.x(R, 8)
    assert lt_endo(G, R(2), 8) == Series.from_coeffs(R, [2, 1], 8)


def test_group_law_over_z3_cubic_part():
    G = group((3, 1, 1))
    R = G.ring
    F = G.F
    assert F.coeff(1, 0) == 1 and F.coeff(0, 1) == 1
    assert F.coeff(2, 1) == F.coeff(1, 2)
    assert F.coeff(2, 1).valuation() == 0


def test_lazard_examples():
    res = lazard_check(group((2, 1, 1)))
    assert res.matches and res.sign_convention == -1
    res3 = lazard_check(group((3, 1, 1)))
    assert res3.sign_convention == -1
    for spec in TEST_RINGS:
        G = group(spec)
        assert G.F.coeff(1, 0) == 1 and G.F.coeff(0, 1) == 1


def test_reduce_examples():
    G = group((2, 1, 1))
    F2 = FiniteField(2)
    assert reduce_endo(G, G.ring(2), 8) == Series.from_coeffs(F2, [0, 1], 8)
    assert reduce_endo(G, G.ring(5), 8) == Series.from_coeffs(F2, [1, 0, 0, 1, 1], 8)
    red = group_reduce(G).F
    assert red == BiSeries(F2, G.trunc, {(1, 0): (1,), (0, 1): (1,), (1, 1): (1,)})


@pytest.mark.parametrize("spec", TEST_RINGS)
def test_axioms_hold(spec):
    assert all(group(spec).check_axioms().values())


elems = st.tuples(st.integers(-50, 50), st.integers(0, 50), st.integers(0, 3))


def _alpha(R, t):
    a, b, k = t
    return R(a) + R.omega() * b * R.pi() ** k


@given(st.sampled_from(TEST_RINGS), elems, elems)
def test_endomorphism_laws(spec, s, t):
    G = group(spec)
    R, D = G.ring, 8
    a, b = _alpha(R, s), _alpha(R, t)
    ea, eb, eab = G.endo(a, D), G.endo(b, D), G.endo(a * b, D)
    assert s_compose(ea, eb) == eab == s_compose(eb, ea)
    assert s_derivative(ea)[0] == a
    F = G.F
    trunc = min(D, F.trunc)
    lhs = bi_substitute(F, ea.truncate(trunc), eb.truncate(trunc))
    assert lhs == G.endo(a + b, trunc)


@given(st.sampled_from(TEST_RINGS), st.integers(1, 2), st.integers(1, 20))
def test_wideg_and_frobenius_shape(spec, m, unit):
    G = group(spec)
    R = G.ring
    if unit % R.p == 0:
        unit += 1
    D = R.q ** m * 3
    beta = R.pi() ** m * unit
    red = reduce_endo(G, beta, D)
    assert wideg(red) == R.q ** m
    gamma = frobenius_factor(red, m)
    assert not gamma[1].is_zero()
