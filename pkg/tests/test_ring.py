import pytest
from hypothesis import given, strategies as st

from ramforge.errors import (INFINITE_AT_PRECISION, NotAUnit, NotDivisible, RingMismatch, ValidationError,
                             ZeroInput)
from ramforge.ring import (FiniteField, FqElem, RingSpec, make_ring, pi_divide, residue_reduce, ring_arith,
                           teichmuller, unit_inverse)

from conftest import TEST_RINGS


def test_integer_product_mod_16(z2):
    assert ring_arith(z2(3), z2(5), "mul") == 15


def test_pi_squared_is_two():
    R = make_ring(2, 1, 2, prec=8)
    assert R.pi() * R.pi() == R(2)


def test_add_zero(z2):
    a = z2(7)
    assert a + z2.zero() == a


def test_ring_mismatch():
    with pytest.raises(RingMismatch):
        ring_arith(make_ring(2, prec=4)(1), make_ring(3, prec=4)(1), "add")


def test_valuations():
    assert make_ring(2, prec=8)(4).valuation() == 2
    R = make_ring(2, 1, 2, prec=8)
    assert (R.pi() + 2).valuation() == 1
    assert R(2).valuation() == 2
    assert R.zero().valuation() is INFINITE_AT_PRECISION


def test_unit_inverse(z2):
    inv = unit_inverse(z2(3))
    assert inv == 11
    assert unit_inverse(z2(1)) == 1
    with pytest.raises(NotAUnit):
        unit_inverse(z2(2))


def test_pi_divide(z2):
    r = pi_divide(z2(6), 1)
    assert r == 3 and r.known_prec == 3
    z = pi_divide(z2.zero(), 1)
    assert z.is_zero() and z.known_prec == 3
    with pytest.raises(NotDivisible):
        pi_divide(z2(3), 1)


def test_pi_divide_ramified():
    R = make_ring(3, 1, 2, prec=8)
    a = R.pi() * R(5)
    assert pi_divide(a, 1) == R(5).with_prec(7)


def test_teichmuller_examples():
    R3 = make_ring(3, prec=2)
    t = teichmuller(FqElem(R3.residue_field, (2,)), R3)
    assert t == 8
    R2 = make_ring(2, prec=6)
    assert teichmuller(R2.residue_field.one, R2) == 1
    R4 = make_ring(2, 2, 1, prec=10)
    gen = R4.residue_field.gen()
    w = teichmuller(gen, R4)
    assert w ** 3 == 1
    assert residue_reduce(w) == gen
    with pytest.raises(ZeroInput):
        teichmuller(R4.residue_field.zero, R4)


def test_residue_reduce():
    assert residue_reduce(make_ring(2)(5)) == FiniteField(2).one
    assert residue_reduce(make_ring(2, 1, 2).pi()).is_zero()
    assert residue_reduce(make_ring(3)(8)).v == (2,)


def test_inertial_table_and_validation():
    assert make_ring(2, 2, 1).inertial_poly == (1, 1, 1)
    with pytest.raises(ValidationError):
        RingSpec(4)
    with pytest.raises(ValidationError):
        RingSpec(2, 1, 2, eisenstein_poly=(-4, 0, 1))
    with pytest.raises(ValidationError):
        RingSpec(2, 2, 1, inertial_poly=(1, 0, 1))


def _elem(R, data):
    rows = [[c for c in data[i * R.f:(i + 1) * R.f]] for i in range(R.e)]
    return R(rows)


ring_params = st.sampled_from(TEST_RINGS)
digits = st.lists(st.integers(0, 10 ** 6), min_size=4, max_size=4)


@given(ring_params, digits, digits, digits)
def test_ring_axioms(spec, a, b, c):
    R = make_ring(*spec, prec=10)
    x, y, z = _elem(R, a), _elem(R, b), _elem(R, c)
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x - x == 0


@given(st.sampled_from([(2, 1), (2, 2), (3, 1), (3, 2), (2, 3)]), st.data())
def test_field_axioms(pf, data):
    F = FiniteField(*pf)
    elems = list(F.elements())
    a, b, c = (data.draw(st.sampled_from(elems)) for _ in range(3))
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    if not a.is_zero():
        assert a * a.inverse() == F.one
    assert a ** F.q == a


@given(ring_params, digits, digits)
def test_valuation_laws(spec, a, b):
    R = make_ring(*spec, prec=12)
    x, y = _elem(R, a), _elem(R, b)
    vx, vy, vxy, vs = x.valuation(), y.valuation(), (x * y).valuation(), (x + y).valuation()
    if vx + vy < R.prec:
        assert vxy == vx + vy
    if max(vx, vy, vs) < R.prec:
        assert vs >= min(vx, vy)


@given(ring_params, st.integers(1, 4), st.data())
def test_unit_power_raises_level(spec, ell, data):
    R = make_ring(*spec, prec=16)
    if ell * (R.p - 1) <= R.e:
        ell = R.e // (R.p - 1) + 1
    tail = _elem(R, data.draw(digits))
    unit_part = data.draw(st.integers(1, R.p - 1))
    u = 1 + R.pi() ** ell * (R(unit_part) + R.pi() * tail)
    assert (u - 1).valuation() == ell
    assert (u ** R.p - 1).valuation() == ell + R.e


@given(ring_params, st.data())
def test_teichmuller_and_inverse_round_trip(spec, data):
    R = make_ring(*spec, prec=10)
    F = R.residue_field
    res = data.draw(st.sampled_from([x for x in F.elements() if not x.is_zero()]))
    t = teichmuller(res, R)
    assert t ** (R.q - 1) == 1
    assert residue_reduce(t) == res
    inv = unit_inverse(t + R.pi())
    assert inv * (t + R.pi()) == 1
