"""Exact arithmetic in O_K / pi^N and in its residue field F_q.

O_K is presented as a tower: W = Z_p[t]/(P(t)) with P monic of degree f and
irreducible mod p (the unramified step), then O_K = W[pi]/(E(pi)) with E an
Eisenstein polynomial of degree e over W.  An element is stored as the e x f
array of integers a_ij in  sum a_ij * omega^j * pi^i,  reduced canonically
modulo pi^known_prec: the pi^i row is kept modulo p^ceil((known_prec - i)/e).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from .errors import (
    INFINITE_AT_PRECISION,
    InsufficientPrecision,
    NotAUnit,
    NotDivisible,
    RingMismatch,
    ValidationError,
    ZeroInput,
)

# Fixed per (p, f) so serialized rings are reproducible.  A length-one entry
# [1] denotes the trivial unramified step (f = 1).
INERTIAL_TABLE = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 0, 1),
    (7, 2): (1, 0, 1),
}

TEST_RINGS = ((2, 1, 1), (3, 1, 1), (2, 2, 1), (2, 1, 2), (3, 1, 2))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def vp_int(n: int, p: int) -> float | int:
    if n == 0:
        return INFINITE_AT_PRECISION
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ----------------------------------------------------------------------------
# polynomials over F_p as coefficient tuples (ascending)

def _fp_trim(a, p):
    a = [c % p for c in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_divmod_rem(a, b, p):
    a = _fp_trim(a, p)
    b = _fp_trim(b, p)
    inv = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        shift = len(a) - len(b)
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bc) % p
        a = _fp_trim(a, p)
    return a


def is_irreducible_mod_p(poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _fp_trim(poly, p)
    n = len(poly) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    for d in range(1, n // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            if not _fp_divmod_rem(poly, list(tail) + [1], p):
                return False
    return True


def default_inertial_poly(p: int, f: int) -> tuple[int, ...]:
    if f == 1:
        return (1,)
    if (p, f) in INERTIAL_TABLE:
        return INERTIAL_TABLE[(p, f)]
    for tail in itertools.product(range(p), repeat=f):
        if tail[0] == 0:
            continue
        cand = tuple(tail) + (1,)
        if is_irreducible_mod_p(cand, p):
            return cand
    raise ValidationError(f"no irreducible polynomial of degree {f} mod {p}")


# ----------------------------------------------------------------------------
# residue field

class FiniteField:
    """F_q = F_p[t]/(modulus) with q = p^f."""

    def __init__(self, p: int, f: int = 1, modulus=None):
        if not is_prime(p):
            raise ValidationError(f"p={p} is not prime")
        if modulus is None or f == 1:
            modulus = (0, 1) if f == 1 else default_inertial_poly(p, f)
        modulus = tuple(c % p for c in modulus)
        if len(modulus) != f + 1 or modulus[-1] != 1:
            raise ValidationError("field modulus must be monic of degree f")
        if f > 1 and not is_irreducible_mod_p(modulus, p):
            raise ValidationError(f"modulus {modulus} is reducible mod {p}")
        self.p = p
        self.f = f
        self.q = p ** f
        self.modulus = modulus
        self._zero = FqElem(self, (0,) * f)
        self._one = FqElem(self, (1,) + (0,) * (f - 1))

    def __eq__(self, other):
        return (isinstance(other, FiniteField) and self.p == other.p
                and self.f == other.f and self.modulus == other.modulus)

    def __hash__(self):
        return hash(("Fq", self.p, self.f, self.modulus))

    def __repr__(self):
        return f"FiniteField(p={self.p}, f={self.f})"

    @property
    def zero(self):
        return self._zero

    @property
    def one(self):
        return self._one

    def gen(self):
        if self.f == 1:
            return self._zero
        return FqElem(self, (0, 1) + (0,) * (self.f - 2))

    def __call__(self, value):
        if isinstance(value, FqElem):
            if value.field != self:
                raise RingMismatch("element of a different field")
            return value
        if isinstance(value, int):
            return FqElem(self, (value % self.p,) + (0,) * (self.f - 1))
        vec = [int(c) % self.p for c in value]
        if len(vec) != self.f:
            raise ValidationError(f"expected {self.f} coordinates, got {len(vec)}")
        return FqElem(self, tuple(vec))

    def elements(self):
        for vec in itertools.product(range(self.p), repeat=self.f):
            yield FqElem(self, tuple(reversed(vec)))

    def _reduce(self, prod):
        p, f, mod = self.p, self.f, self.modulus
        prod = list(prod)
        for k in range(len(prod) - 1, f - 1, -1):
            c = prod[k] % p
            if c:
                for j in range(f):
                    prod[k - f + j] -= c * mod[j]
        return tuple(c % p for c in prod[:f]) + (0,) * max(0, f - len(prod))


class FqElem:
    __slots__ = ("field", "v")

    def __init__(self, field: FiniteField, v: tuple):
        self.field = field
        self.v = v

    def _coerce(self, other):
        if isinstance(other, FqElem):
            if other.field is not self.field and other.field != self.field:
                raise RingMismatch("elements of different fields")
            return other
        if isinstance(other, int):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.field.p
        return FqElem(self.field, tuple((a + b) % p for a, b in zip(self.v, other.v)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.field.p
        return FqElem(self.field, tuple((a - b) % p for a, b in zip(self.v, other.v)))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        p = self.field.p
        return FqElem(self.field, tuple(-a % p for a in self.v))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f = self.field.f
        if f == 1:
            return FqElem(self.field, (self.v[0] * other.v[0] % self.field.p,))
        prod = [0] * (2 * f - 1)
        for i, a in enumerate(self.v):
            if a:
                for j, b in enumerate(other.v):
                    prod[i + j] += a * b
        return FqElem(self.field, self.field._reduce(prod))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in F_q")
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def is_zero(self) -> bool:
        return not any(self.v)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field(other)
        return isinstance(other, FqElem) and self.v == other.v and self.field == other.field

    def __hash__(self):
        return hash(self.v)

    def __repr__(self):
        if self.field.f == 1:
            return str(self.v[0])
        terms = []
        for j, c in enumerate(self.v):
            if c:
                terms.append(str(c) if j == 0 else (f"{c}*w^{j}" if c != 1 else f"w^{j}"))
        return " + ".join(terms) if terms else "0"


# ----------------------------------------------------------------------------
# the p-adic ring

def _as_w(value, f):
    """Normalise an unramified-step coefficient to an f-tuple of ints."""
    if isinstance(value, int):
        return (value,) + (0,) * (f - 1)
    vec = tuple(int(c) for c in value)
    if len(vec) > f:
        raise ValidationError(f"unramified coefficient {value} has more than f={f} entries")
    return vec + (0,) * (f - len(vec))


@dataclass(frozen=True)
class RingSpec:
    p: int
    f: int = 1
    e: int = 1
    inertial_poly: tuple = None
    eisenstein_poly: tuple = None
    prec: int = 16
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        p, f, e = self.p, self.f, self.e
        if not is_prime(p):
            raise ValidationError(f"p={p} is not prime")
        if f < 1 or e < 1:
            raise ValidationError("f and e must be >= 1")
        if self.prec < 1:
            raise ValidationError("prec must be >= 1")
        inert = self.inertial_poly
        inert = default_inertial_poly(p, f) if inert is None else tuple(int(c) for c in inert)
        object.__setattr__(self, "inertial_poly", inert)
        if f == 1:
            if inert not in ((1,),) and (len(inert) != 2 or inert[-1] != 1):
                raise ValidationError("for f=1 inertial_poly must be [1] or monic linear")
        else:
            if len(inert) != f + 1 or inert[-1] != 1:
                raise ValidationError("inertial_poly must be monic of degree f")
            if not is_irreducible_mod_p(inert, p):
                raise ValidationError(f"inertial_poly {list(inert)} is reducible mod {p}")
        eis = self.eisenstein_poly
        if eis is None:
            eis = (-p,) + (0,) * (e - 1) + (1,)
        eis = tuple(c if isinstance(c, int) else tuple(int(x) for x in c) for c in eis)
        object.__setattr__(self, "eisenstein_poly", eis)
        if len(eis) != e + 1 or _as_w(eis[-1], f) != (1,) + (0,) * (f - 1):
            raise ValidationError("eisenstein_poly must be monic of degree e")
        for i, c in enumerate(eis[:-1]):
            w = _as_w(c, f)
            if any(x % p for x in w):
                raise ValidationError(f"eisenstein_poly coefficient {i} is not divisible by p")
        if all(x % (p * p) == 0 for x in _as_w(eis[0], f)):
            raise ValidationError("eisenstein_poly constant term must have p-valuation exactly 1")

    # -- derived data -----------------------------------------------------
    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def d(self) -> int:
        return self.e * self.f

    @cached_property
    def structure(self) -> tuple:
        return (self.p, self.f, self.e, self.inertial_poly, self.eisenstein_poly)

    @cached_property
    def residue_field(self) -> FiniteField:
        mod = self.inertial_poly if self.f > 1 else (0, 1)
        return FiniteField(self.p, self.f, mod)

    @cached_property
    def _wmod(self) -> tuple:
        return self.inertial_poly if self.f > 1 else (0, 1)

    @cached_property
    def _neg_eis(self) -> tuple:
        # pi^e = sum_i neg_eis[i] * pi^i
        return tuple(tuple(-x for x in _as_w(c, self.f)) for c in self.eisenstein_poly[:-1])

    def with_prec(self, prec: int) -> "RingSpec":
        return RingSpec(self.p, self.f, self.e, self.inertial_poly, self.eisenstein_poly, prec)

    def compatible(self, other) -> bool:
        return isinstance(other, RingSpec) and (other is self or other.structure == self.structure)

    def __repr__(self):
        return f"RingSpec(p={self.p}, f={self.f}, e={self.e}, prec={self.prec})"

    # -- raw arithmetic on flat tuples (index i*f + j for pi^i omega^j) ---
    def _moduli(self, prec: int) -> tuple:
        key = ("mod", prec)
        m = self._cache.get(key)
        if m is None:
            p, e, f = self.p, self.e, self.f
            m = tuple(p ** max(0, _ceil_div(prec - i, e)) for i in range(e) for _ in range(f))
            self._cache[key] = m
        return m

    def _canon(self, flat, prec: int) -> tuple:
        return tuple(c % m for c, m in zip(flat, self._moduli(max(prec, 0))))

    def _wmul(self, a, b, modulus: int):
        f = self.f
        if f == 1:
            return (a[0] * b[0] % modulus,)
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        return self._wreduce(prod, modulus)

    def _wreduce(self, prod, modulus: int):
        f = self.f
        if f == 1:
            return (prod[0] % modulus,)
        mod = self._wmod
        prod = list(prod)
        for k in range(len(prod) - 1, f - 1, -1):
            c = prod[k]
            if c:
                for j in range(f):
                    prod[k - f + j] -= c * mod[j]
        out = [c % modulus for c in prod[:f]]
        out += [0] * (f - len(out))
        return tuple(out)

    def _reduce_poly(self, rows, prec: int) -> tuple:
        """rows[i] = list of omega-coefficients of the pi^i term (any lengths)."""
        e, f = self.e, self.f
        modulus = self.p ** max(1, _ceil_div(prec, e))
        rows = [list(self._wreduce(r, modulus)) if len(r) else [0] * f for r in rows]
        neg = self._neg_eis
        for k in range(len(rows) - 1, e - 1, -1):
            c = rows[k]
            if any(c):
                for i in range(e):
                    t = self._wmul(c, neg[i], modulus)
                    row = rows[k - e + i]
                    for j in range(f):
                        row[j] += t[j]
        flat = []
        for i in range(e):
            r = rows[i] if i < len(rows) else [0] * f
            flat.extend(r[:f])
        return self._canon(flat, prec)

    def _mul_raw(self, a, b, prec: int) -> tuple:
        e, f = self.e, self.f
        if e == 1 and f == 1:
            return (a[0] * b[0] % self._moduli(prec)[0],)
        rows = [[0] * (2 * f - 1) for _ in range(2 * e - 1)]
        for i1 in range(e):
            for j1 in range(f):
                x = a[i1 * f + j1]
                if not x:
                    continue
                for i2 in range(e):
                    row = rows[i1 + i2]
                    base = i2 * f
                    for j2 in range(f):
                        y = b[base + j2]
                        if y:
                            row[j1 + j2] += x * y
        return self._reduce_poly(rows, prec)

    def _valuation_raw(self, flat):
        p, e, f = self.p, self.e, self.f
        best = INFINITE_AT_PRECISION
        for i in range(e):
            for j in range(f):
                c = flat[i * f + j]
                if c:
                    v = i + e * vp_int(c, p)
                    if v < best:
                        best = v
        return best

    # -- element constructors --------------------------------------------
    def __call__(self, value=0, prec: int | None = None) -> "OKElem":
        prec = self.prec if prec is None else prec
        if isinstance(value, OKElem):
            if not self.compatible(value.ring):
                raise RingMismatch("element of a different ring")
            prec = min(prec, value.known_prec)
            return OKElem(self, self._canon(value._v, prec), prec)
        if isinstance(value, FqElem):
            return self.lift(value, prec)
        if isinstance(value, int):
            flat = (value,) + (0,) * (self.e * self.f - 1)
            return OKElem(self, self._canon(flat, prec), prec)
        value = list(value)
        if self.e == 1 and self.f > 1 and all(isinstance(r, int) for r in value):
            value = [value]
        rows = [list(r) if not isinstance(r, int) else [r] for r in value]
        if len(rows) > self.e:
            raise ValidationError(f"expected at most e={self.e} rows")
        flat = []
        for i in range(self.e):
            r = rows[i] if i < len(rows) else []
            if len(r) > self.f:
                raise ValidationError(f"row {i} has more than f={self.f} entries")
            flat.extend(int(c) for c in r)
            flat.extend([0] * (self.f - len(r)))
        return OKElem(self, self._canon(flat, prec), prec)

    def zero(self, prec=None):
        return self(0, prec)

    def one(self, prec=None):
        return self(1, prec)

    def pi(self, prec=None) -> "OKElem":
        prec = self.prec if prec is None else prec
        if self.e == 1:
            # pi is the root of pi - c0, i.e. -c0
            return OKElem(self, self._canon(self._neg_eis[0], prec), prec)
        flat = [0] * (self.e * self.f)
        flat[self.f] = 1
        return OKElem(self, self._canon(flat, prec), prec)

    def omega(self, prec=None) -> "OKElem":
        """The class of t in the unramified step (0 when f = 1)."""
        prec = self.prec if prec is None else prec
        if self.f == 1:
            return self.zero(prec)
        flat = [0] * (self.e * self.f)
        flat[1] = 1
        return OKElem(self, self._canon(flat, prec), prec)

    def lift(self, res: FqElem, prec=None) -> "OKElem":
        prec = self.prec if prec is None else prec
        if res.field != self.residue_field:
            raise RingMismatch("residue of a different field")
        flat = list(res.v) + [0] * (self.f * (self.e - 1))
        return OKElem(self, self._canon(flat, prec), prec)

    def _unit_u(self, prec):
        """U with  pi^e = p * U,  a unit of O_K."""
        key = ("U", prec)
        u = self._cache.get(key)
        if u is None:
            rows = [[x // self.p for x in c] for c in self._neg_eis]
            u = self(rows, prec)
            self._cache[key] = u
        return u


class OKElem:
    """An element of O_K known modulo pi^known_prec."""

    __slots__ = ("ring", "_v", "known_prec")

    def __init__(self, ring: RingSpec, v: tuple, known_prec: int):
        self.ring = ring
        self._v = v
        self.known_prec = known_prec

    @property
    def coeffs(self) -> tuple:
        f = self.ring.f
        return tuple(self._v[i * f:(i + 1) * f] for i in range(self.ring.e))

    def _coerce(self, other):
        if isinstance(other, OKElem):
            if other.ring is not self.ring and not self.ring.compatible(other.ring):
                raise RingMismatch("elements of different rings")
            return other
        if isinstance(other, int):
            return self.ring(other, self.known_prec)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.known_prec, other.known_prec)
        return OKElem(self.ring, self.ring._canon([a + b for a, b in zip(self._v, other._v)], prec), prec)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.known_prec, other.known_prec)
        return OKElem(self.ring, self.ring._canon([a - b for a, b in zip(self._v, other._v)], prec), prec)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return OKElem(self.ring, self.ring._canon([-a for a in self._v], self.known_prec), self.known_prec)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.known_prec, other.known_prec)
        return OKElem(self.ring, self.ring._mul_raw(self._v, other._v, prec), prec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return unit_inverse(self) ** (-n)
        result = self.ring.one(self.known_prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def valuation(self):
        return self.ring._valuation_raw(self._v)

    def is_zero(self) -> bool:
        return not any(self._v)

    def __bool__(self):
        return not self.is_zero()

    def with_prec(self, prec: int) -> "OKElem":
        prec = min(prec, self.known_prec)
        return OKElem(self.ring, self.ring._canon(self._v, prec), prec)

    def promote(self, prec: int) -> "OKElem":
        """Treat the canonical representative as exact and re-encode it at ``prec``."""
        return OKElem(self.ring, self.ring._canon(self._v, prec), prec)

    def congruent(self, other, k: int) -> bool:
        """a == b modulo pi^k (requires both known to at least k)."""
        other = self._coerce(other)
        if min(self.known_prec, other.known_prec) < k:
            raise InsufficientPrecision(f"need precision {k} to compare")
        return (self - other).with_prec(k).is_zero()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring(other)
        if not isinstance(other, OKElem) or not self.ring.compatible(other.ring):
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash(self.ring.structure)

    def key(self) -> tuple:
        return (self._v, self.known_prec)

    def __repr__(self):
        terms = []
        f = self.ring.f
        for i, row in enumerate(self.coeffs):
            for j, c in enumerate(row):
                if c:
                    mon = "*".join(x for x in (f"w^{j}" if j > 1 else ("w" if j == 1 else ""),
                                                f"pi^{i}" if i > 1 else ("pi" if i == 1 else "")) if x)
                    terms.append(f"{c}*{mon}" if mon else str(c))
        body = " + ".join(terms) if terms else "0"
        return f"{body} (mod pi^{self.known_prec})"


# ----------------------------------------------------------------------------
# module-level operations

def ring_arith(a: OKElem, b: OKElem, op: str) -> OKElem:
    if not a.ring.compatible(b.ring):
        raise RingMismatch("ring_arith on different rings")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValidationError(f"unknown op {op!r}")


def valuation(a: OKElem):
    return a.valuation()


def residue_reduce(a: OKElem) -> FqElem:
    if a.known_prec < 1:
        raise InsufficientPrecision("element carries no pi-adic digits")
    fld = a.ring.residue_field
    return FqElem(fld, tuple(c % a.ring.p for c in a._v[:a.ring.f]))


def unit_inverse(a: OKElem) -> OKElem:
    """Inverse of a unit by Newton iteration y <- y(2 - a y)."""
    if a.known_prec < 1 or a.valuation() != 0:
        raise NotAUnit(f"{a!r} is not a unit")
    ring = a.ring
    prec = a.known_prec
    y = ring.lift(residue_reduce(a).inverse(), prec)
    two = ring(2, prec)
    known = 1
    while known < prec:
        y = y * (two - a * y)
        known *= 2
    if not (a * y - 1).is_zero():
        raise NotAUnit("Newton inversion failed to converge")
    return y


def pi_divide(a: OKElem, k: int) -> OKElem:
    """Exact division by pi^k; the result is known to k fewer digits."""
    if k < 0:
        raise ValidationError("k must be >= 0")
    if k == 0:
        return a
    v = a.valuation()
    if v < k:
        raise NotDivisible(f"valuation {v} < {k}")
    ring = a.ring
    p, e = ring.p, ring.e
    prec = a.known_prec
    if prec - k < 0:
        raise InsufficientPrecision("division would leave negative precision")
    flat = list(a._v)
    m, r = divmod(k, e)
    if m:
        flat = [c // p ** m for c in flat]
        prec -= m * e
    cur = OKElem(ring, ring._canon(flat, prec), prec)
    for _ in range(r):
        # a / pi = a * pi^(e-1) * U^-1 / p   where pi^e = p U
        wide = prec + e - 1
        num = OKElem(ring, ring._canon(cur._v, wide), wide)
        num = num * ring.pi(wide) ** (e - 1) * unit_inverse(ring._unit_u(wide))
        prec -= 1
        cur = OKElem(ring, ring._canon([c // p for c in num._v], prec), prec)
    return cur


def teichmuller(res: FqElem, ring: RingSpec, prec: int | None = None) -> OKElem:
    """The (q-1)-th root of unity reducing to ``res``: fixed point of x -> x^q."""
    if res.is_zero():
        raise ZeroInput("teichmuller lift of zero")
    prec = ring.prec if prec is None else prec
    x = ring.lift(res, prec)
    for _ in range(prec + 2):
        y = x ** ring.q
        if (y - x).is_zero():
            return x
        x = y
    raise InsufficientPrecision("Teichmuller iteration did not stabilise")


def make_ring(p: int, f: int = 1, e: int = 1, prec: int = 16) -> RingSpec:
    """Ring from the shipped table: Eisenstein pi^e - p (pi = p when e = 1)."""
    return RingSpec(p, f, e, prec=prec)
