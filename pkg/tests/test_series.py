import pytest
from hypothesis import given, strategies as st

from ramforge.errors import INFINITE_AT_PRECISION, NotInvertible, ValidationError
from ramforge.ring import FiniteField, make_ring
from ramforge.series import (BiSeries, Series, bi_substitute, s_comp_inverse, s_compose, s_derivative,
                             s_iterate, s_mul, s_reduce, wideg)


def fp(p, coeffs, D=None):
    return Series.from_coeffs(FiniteField(p), coeffs, D)


def as_ints(s):
    return [c.v[0] if hasattr(c, "v") else int(c.coeffs[0][0]) for c in s.coeffs]


# schoolbook oracle over Z/m, lists c_1..c_D
def naive_mul(a, b, m, D):
    out = [0] * (D + 1)
    for i, x in enumerate([0] + a):
        for j, y in enumerate([0] + b):
            if i + j <= D:
                out[i + j] = (out[i + j] + x * y) % m
    return out[1:]


def naive_compose(a, b, m, D):
    acc = [0] * D
    power = [1] + [0] * D  # b^0 with constant slot
    for k, c in enumerate(a, start=1):
        nxt = [0] * (D + 1)
        for i, x in enumerate(power):
            for j, y in enumerate([0] + b):
                if i + j <= D:
                    nxt[i + j] = (nxt[i + j] + x * y) % m
        power = nxt
        acc = [(u + c * v) % m for u, v in zip(acc, power[1:])]
    return acc


def test_mul_examples():
    a = fp(2, [1, 1], 4)
    assert as_ints(s_mul(a, a)) == [0, 1, 0, 1]
    assert s_mul(a, Series.zero(FiniteField(2), 4)).is_zero()
    R = make_ring(2, prec=8)
    assert s_mul(Series.from_coeffs(R, [2], 3), Series.x(R, 3)) == Series.from_coeffs(R, [0, 2], 3)


def test_truncation_mismatch():
    with pytest.raises(ValidationError):
        s_mul(fp(2, [1], 3), fp(2, [1], 4))


def test_compose_examples():
    out = s_compose(fp(2, [1, 1], 6), fp(2, [1, 0, 1], 6))
    assert as_ints(out) == [1, 1, 1, 0, 0, 1]
    inner = fp(3, [1, 2, 1], 5)
    assert s_compose(Series.x(FiniteField(3), 5), inner) == inner
    assert as_ints(s_compose(fp(3, [1, 0, 1], 3), fp(3, [2], 3))) == [2, 0, 2]


def test_inverse_examples():
    assert as_ints(s_comp_inverse(fp(2, [1, 1], 4))) == [1, 1, 0, 1]
    x = Series.x(FiniteField(2), 5)
    assert s_comp_inverse(x) == x
    with pytest.raises(NotInvertible):
        s_comp_inverse(Series.from_coeffs(make_ring(2), [2, 1], 4))


def test_derivative_examples():
    R = make_ring(5, prec=4)
    assert [int(c.coeffs[0][0]) for c in s_derivative(Series.from_coeffs(R, [1, 1], 2))] == [1, 2]
    assert [c.v[0] for c in s_derivative(fp(2, [1, 1], 2))] == [1, 0]
    Z2 = make_ring(2, prec=6)
    d = s_derivative(Series.from_coeffs(Z2, [3, 0, 1], 3))
    assert [c == v for c, v in zip(d, [3, 0, 3])] == [True] * 3


def test_iterate_examples():
    s = fp(2, [1, 1], 16)
    assert as_ints(s_iterate(s, 2)) == [1, 0, 0, 1] + [0] * 12
    assert s_iterate(s, 1) == s
    assert as_ints(s_iterate(s, 4)) == [1] + [0] * 14 + [1]
    assert s_iterate(s, 0) == Series.x(FiniteField(2), 16)


def test_wideg_examples():
    Z2 = make_ring(2, prec=8)
    assert wideg(Series.from_coeffs(Z2, [2, 1], 4)) == 2
    assert wideg(Series.x(Z2, 4)) == 1
    assert wideg(Series.from_coeffs(Z2, [2, 4], 8)) is INFINITE_AT_PRECISION


def test_reduce_examples():
    Z2, Z3 = make_ring(2, prec=4), make_ring(3, prec=4)
    assert as_ints(s_reduce(Series.from_coeffs(Z2, [3, 5], 2))) == [1, 1]
    assert as_ints(s_reduce(Series.from_coeffs(Z2, [2, 1], 2))) == [0, 1]
    assert as_ints(s_reduce(Series.from_coeffs(Z3, [3, 0, 1], 3))) == [0, 0, 1]


def test_bi_substitute_examples():
    Z2 = make_ring(2, prec=12)
    D = 8
    F = BiSeries(Z2, D, {(1, 0): (1,), (0, 1): (1,), (1, 1): (1,)})
    x = Series.x(Z2, D)
    assert bi_substitute(F, x, Series.zero(Z2, D)) == x
    assert bi_substitute(F, x, x) == Series.from_coeffs(Z2, [2, 1], D)
    inv = Series.from_coeffs(Z2, [(-1) ** k for k in range(1, D + 1)], D)
    assert bi_substitute(F, x, inv).is_zero()


coeff_lists = st.lists(st.integers(0, 100), min_size=8, max_size=8)
units = st.integers(1, 100).filter(lambda n: n % 3)


@given(coeff_lists, coeff_lists)
def test_mul_matches_schoolbook(a, b):
    m = 3 ** 5
    R = make_ring(3, prec=5)
    got = s_mul(Series.from_coeffs(R, a, 8), Series.from_coeffs(R, b, 8))
    assert [int(c.coeffs[0][0]) % m for c in got.coeffs] == naive_mul(a, b, m, 8)


@given(coeff_lists, coeff_lists)
def test_compose_matches_naive(a, b):
    m = 2 ** 6
    R = make_ring(2, prec=6)
    got = s_compose(Series.from_coeffs(R, a, 8), Series.from_coeffs(R, b, 8))
    assert [int(c.coeffs[0][0]) % m for c in got.coeffs] == naive_compose(a, b, m, 8)


@given(coeff_lists, coeff_lists, coeff_lists)
def test_compose_associative(a, b, c):
    R = make_ring(2, 2, 1, prec=6)
    s, t, u = (Series.from_coeffs(R, v, 8) for v in (a, b, c))
    assert s_compose(s_compose(s, t), u) == s_compose(s, s_compose(t, u))


@given(units, coeff_lists, units, coeff_lists)
def test_derivative_at_zero_multiplicative(u1, a, u2, b):
    R = make_ring(3, 1, 2, prec=8)
    s = Series.from_coeffs(R, [u1] + a[1:], 8)
    t = Series.from_coeffs(R, [u2] + b[1:], 8)
    assert s_derivative(s_compose(s, t))[0] == s_derivative(s)[0] * s_derivative(t)[0]


@given(units, coeff_lists)
def test_inverse_round_trip(u, a):
    R = make_ring(3, 1, 1, prec=6)
    s = Series.from_coeffs(R, [u] + a[1:], 8)
    inv = s_comp_inverse(s)
    x = Series.x(R, 8)
    assert s_compose(s, inv) == x and s_compose(inv, s) == x


@given(st.integers(1, 3), st.integers(1, 3), coeff_lists, coeff_lists)
def test_wideg_multiplicative(k1, k2, a, b):
    R = make_ring(2, prec=10)
    D = 12
    s = Series.from_coeffs(R, [2 * c for c in a[:k1 - 1]] + [1] + a[k1:], D)
    t = Series.from_coeffs(R, [2 * c for c in b[:k2 - 1]] + [1] + b[k2:], D)
    s = Series.from_coeffs(R, [2] + [c for c in s.coeffs[1:]], D) if k1 > 1 else s
    t = Series.from_coeffs(R, [2] + [c for c in t.coeffs[1:]], D) if k2 > 1 else t
    assert wideg(s_compose(s, t)) == wideg(s) * wideg(t)


@given(coeff_lists, coeff_lists)
def test_reduce_commutes(a, b):
    R = make_ring(2, 1, 2, prec=6)
    s, t = Series.from_coeffs(R, a, 8), Series.from_coeffs(R, b, 8)
    assert s_reduce(s_compose(s, t)) == s_compose(s_reduce(s), s_reduce(t))
    assert s_reduce(s_mul(s, t)) == s_mul(s_reduce(s), s_reduce(t))
