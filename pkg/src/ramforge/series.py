"""Truncated power series without constant term, over F_q or O_K.

Coefficients are held in "raw" form, the same flat integer tuples used by
:class:`~ramforge.ring.FqElem` and :class:`~ramforge.ring.OKElem`, so the
inner loops never touch element objects.  Products go through a Kronecker
substitution: each coefficient block (a small polynomial in pi and omega) is
laid out in byte-aligned slots of one big integer, the integers are multiplied
once, and the blocks are unpacked and reduced.

Two truncations are tracked independently: the x-adic degree ``trunc`` and,
over O_K, a per-coefficient pi-adic precision.  A product or composition
coefficient of degree k is reported at the minimum precision of the input
coefficients of degree <= k.
"""

from __future__ import annotations

from itertools import accumulate

from .errors import (
    INFINITE_AT_PRECISION,
    InsufficientPrecision,
    NotInvertible,
    RingMismatch,
    ValidationError,
)
from .ring import FiniteField, FqElem, OKElem, RingSpec, unit_inverse

# ----------------------------------------------------------------------------
# coefficient-domain helpers

def _dims(base):
    if isinstance(base, RingSpec):
        return base.e, base.f
    return 1, base.f


def _same_base(a, b) -> bool:
    if isinstance(a, RingSpec):
        return a.compatible(b)
    return isinstance(b, FiniteField) and a == b


def _zero_raw(base):
    e, f = _dims(base)
    return (0,) * (e * f)


def _one_raw(base):
    e, f = _dims(base)
    return (1,) + (0,) * (e * f - 1)


def _canon(base, c, prec):
    if isinstance(base, RingSpec):
        return base._canon(c, prec)
    p = base.p
    return tuple(x % p for x in c)


def _raw_add(base, a, b, prec):
    return _canon(base, [x + y for x, y in zip(a, b)], prec)


def _raw_sub(base, a, b, prec):
    return _canon(base, [x - y for x, y in zip(a, b)], prec)


def _raw_mul(base, a, b, prec):
    if isinstance(base, RingSpec):
        return base._mul_raw(a, b, prec)
    return (FqElem(base, a) * FqElem(base, b)).v


def _raw_inv(base, a, prec):
    if isinstance(base, RingSpec):
        return unit_inverse(OKElem(base, a, prec))._v
    el = FqElem(base, a)
    if el.is_zero():
        raise NotInvertible("zero has no inverse")
    return el.inverse().v


def _is_unit_raw(base, a) -> bool:
    if isinstance(base, RingSpec):
        return any(c % base.p for c in a[:base.f])
    return any(a)


def _to_raw(base, value, prec):
    """Accept ints, nested lists, FqElem or OKElem; return (raw, known_prec)."""
    if isinstance(base, RingSpec):
        el = base(value, prec)
        return el._v, el.known_prec
    return base(value).v, None


def _elem(base, raw, prec):
    if isinstance(base, RingSpec):
        return OKElem(base, raw, prec)
    return FqElem(base, raw)


# ----------------------------------------------------------------------------
# product kernel

def _poly_mul(base, a, b, n, prec=None):
    """First ``n`` coefficients of the product of dense raw lists a and b.

    Lists are indexed by degree and may carry a constant term.  ``prec`` is the
    pi-adic working precision over O_K (ignored over F_q).
    """
    la, lb = min(len(a), n), min(len(b), n)
    zero = _zero_raw(base)
    while la and not any(a[la - 1]):
        la -= 1
    while lb and not any(b[lb - 1]):
        lb -= 1
    if not la or not lb:
        return [zero] * n
    e, f = _dims(base)
    ok = isinstance(base, RingSpec)
    ring_mod = base._moduli(prec)[0] if ok else base.p
    m = e * f
    maxa = max(max(c) for c in a[:la])
    maxb = max(max(c) for c in b[:lb])
    if not maxa or not maxb:
        return [zero] * n
    nbytes = ((maxa * maxb * min(la, lb) * m).bit_length() + 8) // 8

    if m == 1:
        pa = int.from_bytes(b"".join(c[0].to_bytes(nbytes, "little") for c in a[:la]), "little")
        pb = int.from_bytes(b"".join(c[0].to_bytes(nbytes, "little") for c in b[:lb]), "little")
        out_len = min(n, la + lb - 1)
        raw = ((pa * pb) & ((1 << (8 * nbytes * out_len)) - 1)).to_bytes(nbytes * out_len, "little")
        res = [(int.from_bytes(raw[k * nbytes:(k + 1) * nbytes], "little") % ring_mod,)
               for k in range(out_len)]
        res.extend([zero] * (n - out_len))
        return res

    width = 2 * f - 1
    height = 2 * e - 1
    slots = height * width
    blank = bytes(nbytes)

    def pack(seq):
        chunks = []
        for c in seq:
            block = [blank] * slots
            for i in range(e):
                for j in range(f):
                    x = c[i * f + j]
                    if x:
                        block[i * width + j] = x.to_bytes(nbytes, "little")
            chunks.extend(block)
        return int.from_bytes(b"".join(chunks), "little")

    out_len = min(n, la + lb - 1)
    stride = nbytes * slots
    raw = ((pack(a[:la]) * pack(b[:lb])) & ((1 << (8 * stride * out_len)) - 1)).to_bytes(
        stride * out_len, "little")
    res = []
    for k in range(out_len):
        base_off = k * stride
        vals = [int.from_bytes(raw[base_off + s * nbytes:base_off + (s + 1) * nbytes], "little")
                for s in range(slots)]
        rows = [vals[i * width:(i + 1) * width] for i in range(height)]
        if ok:
            res.append(base._reduce_poly(rows, prec))
        else:
            res.append(base._reduce(rows[0]))
    res.extend([zero] * (n - out_len))
    return res


def _poly_add(base, a, b, prec):
    n = max(len(a), len(b))
    zero = _zero_raw(base)
    a = list(a) + [zero] * (n - len(a))
    b = list(b) + [zero] * (n - len(b))
    return [_raw_add(base, x, y, prec) for x, y in zip(a, b)]


def _poly_compose(base, outer, inner, n, prec=None):
    """outer(inner) mod x^n; ``outer`` may have a constant term, ``inner`` may not."""
    zero = _zero_raw(base)
    if inner and any(inner[0]):
        raise ValidationError("inner series must have no constant term")
    deg = min(len(outer), n) - 1
    while deg > 0 and not any(outer[deg]):
        deg -= 1
    acc = [outer[deg]] if deg >= 0 else [zero]
    # Horner: acc_k = c_k + inner * acc_{k+1}, needed only modulo x^(n-k)
    for k in range(deg - 1, -1, -1):
        acc = _poly_mul(base, acc, inner, n - k, prec)
        acc[0] = _raw_add(base, acc[0], outer[k], prec)
    acc = list(acc[:n]) + [zero] * (n - len(acc))
    return acc


def _poly_reciprocal(base, a, n, prec=None):
    """1/a mod x^n for a with unit constant term (Newton iteration)."""
    if not _is_unit_raw(base, a[0]):
        raise NotInvertible("constant term is not a unit")
    zero = _zero_raw(base)
    two = _canon(base, (2,) + zero[1:], prec)
    r = [_raw_inv(base, a[0], prec)]
    m = 1
    while m < n:
        m = min(2 * m, n)
        ar = _poly_mul(base, a, r, m, prec)
        corr = [_canon(base, [-x for x in c], prec) for c in ar]
        corr[0] = _raw_add(base, corr[0], two, prec)
        r = _poly_mul(base, r, corr, m, prec)
    return r


def _poly_derivative(base, a, prec=None):
    out = []
    for k in range(1, len(a)):
        out.append(_canon(base, [k * x for x in a[k]], prec))
    return out


# ----------------------------------------------------------------------------

class Series:
    """c_1 x + ... + c_D x^D over a residue field or a p-adic ring.

    ``prec`` (O_K only) is a tuple of per-coefficient pi-adic precisions,
    indexed by degree with a dummy entry at 0.
    """

    __slots__ = ("base", "_c", "prec")

    def __init__(self, base, raw, prec=None):
        self.base = base
        self._c = tuple(raw)
        if isinstance(base, RingSpec):
            if prec is None:
                prec = (base.prec,) * len(self._c)
            self.prec = tuple(prec)
        else:
            self.prec = None

    # -- construction ------------------------------------------------------
    @classmethod
    def from_coeffs(cls, base, coeffs, trunc: int | None = None, prec: int | None = None):
        """Build from c_1, c_2, ...; missing coefficients up to ``trunc`` are zero."""
        coeffs = list(coeffs)
        trunc = len(coeffs) if trunc is None else trunc
        if trunc < 1:
            raise ValidationError("truncation degree must be >= 1")
        if len(coeffs) > trunc:
            raise ValidationError(f"{len(coeffs)} coefficients exceed truncation {trunc}")
        ok = isinstance(base, RingSpec)
        default = base.prec if ok and prec is None else prec
        raw, precs = [_zero_raw(base)], [default]
        for c in coeffs:
            r, kp = _to_raw(base, c, default)
            raw.append(r)
            precs.append(kp)
        for _ in range(trunc - len(coeffs)):
            raw.append(_zero_raw(base))
            precs.append(default)
        return cls(base, raw, precs if ok else None)

    @classmethod
    def x(cls, base, trunc: int, prec: int | None = None):
        return cls.from_coeffs(base, [1], trunc, prec)

    @classmethod
    def zero(cls, base, trunc: int, prec: int | None = None):
        return cls.from_coeffs(base, [], trunc, prec)

    @classmethod
    def monomials(cls, base, terms: dict, trunc: int, prec: int | None = None):
        """Series from {degree: coefficient}; degrees above ``trunc`` are dropped."""
        coeffs = [0] * trunc
        for k, c in terms.items():
            if k < 1:
                raise ValidationError("series have no constant term")
            if k <= trunc:
                coeffs[k - 1] = c
        return cls.from_coeffs(base, coeffs, trunc, prec)

    # -- accessors ---------------------------------------------------------
    @property
    def trunc(self) -> int:
        return len(self._c) - 1

    @property
    def is_ok(self) -> bool:
        return isinstance(self.base, RingSpec)

    def __getitem__(self, k: int):
        if k == 0:
            return _elem(self.base, self._c[0], self.prec[0] if self.prec else None)
        if not 1 <= k <= self.trunc:
            raise IndexError(k)
        return _elem(self.base, self._c[k], self.prec[k] if self.prec else None)

    @property
    def coeffs(self) -> tuple:
        return tuple(self[k] for k in range(1, self.trunc + 1))

    def min_prec(self):
        if self.prec is None:
            return None
        return min(self.prec[1:]) if self.trunc else self.base.prec

    def _work_prec(self, other=None):
        if self.prec is None:
            return None
        vals = list(self.prec[1:])
        if other is not None and other.prec is not None:
            vals += list(other.prec[1:])
        return max(vals)

    def truncate(self, trunc: int) -> "Series":
        if trunc > self.trunc:
            raise InsufficientPrecision(f"cannot extend truncation {self.trunc} to {trunc}")
        return Series(self.base, self._c[:trunc + 1], self.prec[:trunc + 1] if self.prec else None)

    def with_prec(self, prec: int) -> "Series":
        """Reduce every coefficient to pi-adic precision at most ``prec``."""
        if self.prec is None:
            return self
        new_p = tuple(min(prec, kp) for kp in self.prec)
        raw = [self.base._canon(c, kp) for c, kp in zip(self._c, new_p)]
        return Series(self.base, raw, new_p)

    def order(self):
        """Index of the first nonzero coefficient."""
        for k in range(1, self.trunc + 1):
            if any(self._c[k]):
                return k
        return INFINITE_AT_PRECISION

    def is_zero(self) -> bool:
        return not any(any(c) for c in self._c)

    def _check(self, other):
        if not isinstance(other, Series):
            raise ValidationError("expected a Series")
        if not _same_base(self.base, other.base):
            raise RingMismatch("series over different coefficient rings")

    def _combine_prec(self, other, inclusive=True):
        """Prefix-minimum precision profile for a product-like result."""
        if self.prec is None:
            return None
        n = min(self.trunc, other.trunc) + 1
        merged = [min(a, b) for a, b in zip(self.prec[1:n], other.prec[1:n])]
        pref = list(accumulate(merged, min))
        if inclusive:
            return (pref[0],) + tuple(pref) if pref else (self.prec[0],)
        # coefficient k of a product of no-constant series uses degrees <= k-1
        shifted = [pref[0]] + pref[:-1] if pref else []
        return (pref[0] if pref else self.prec[0],) + tuple(shifted)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        self._check(other)
        n = min(self.trunc, other.trunc) + 1
        if self.prec is None:
            raw = [_raw_add(self.base, a, b, None) for a, b in zip(self._c[:n], other._c[:n])]
            return Series(self.base, raw)
        precs = [min(a, b) for a, b in zip(self.prec[:n], other.prec[:n])]
        raw = [_raw_add(self.base, a, b, kp) for a, b, kp in zip(self._c, other._c, precs)]
        return Series(self.base, raw, precs)

    def __neg__(self):
        raw = [_canon(self.base, [-x for x in c], kp)
               for c, kp in zip(self._c, self.prec or [None] * len(self._c))]
        return Series(self.base, raw, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, scalar) -> "Series":
        """Multiply every coefficient by a ring element."""
        raw_s, sp = _to_raw(self.base, scalar, self.min_prec() if self.prec else None)
        if self.prec is None:
            return Series(self.base, [_raw_mul(self.base, c, raw_s, None) for c in self._c])
        precs = [min(kp, sp) for kp in self.prec]
        raw = [_raw_mul(self.base, c, raw_s, kp) for c, kp in zip(self._c, precs)]
        return Series(self.base, raw, precs)

    def __mul__(self, other):
        if isinstance(other, Series):
            return s_mul(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __call__(self, inner: "Series") -> "Series":
        return s_compose(self, inner)

    def __eq__(self, other):
        if not isinstance(other, Series) or not _same_base(self.base, other.base):
            return False
        if self.trunc != other.trunc:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.trunc, self._c))

    def congruent(self, other, trunc: int) -> bool:
        """Equality of the coefficients of degree <= trunc."""
        return (self.truncate(trunc) - other.truncate(trunc)).is_zero()

    def __repr__(self):
        terms = []
        for k in range(1, self.trunc + 1):
            if any(self._c[k]):
                c = self[k]
                text = repr(c).split(" (mod")[0]
                if " + " in text:
                    text = f"({text})"
                mon = "x" if k == 1 else f"x^{k}"
                terms.append(mon if text == "1" else f"{text}*{mon}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(x^{self.trunc + 1})"


# ----------------------------------------------------------------------------
# public operations

def s_mul(a: Series, b: Series) -> Series:
    """Product truncated to degree D (both inputs must share D)."""
    a._check(b)
    if a.trunc != b.trunc:
        raise ValidationError(f"truncation mismatch {a.trunc} vs {b.trunc}")
    n = a.trunc + 1
    raw = _poly_mul(a.base, a._c, b._c, n, a._work_prec(b))
    if a.prec is None:
        return Series(a.base, raw)
    precs = a._combine_prec(b, inclusive=False)
    raw = [a.base._canon(c, kp) for c, kp in zip(raw, precs)]
    return Series(a.base, raw, precs)


def s_compose(outer: Series, inner: Series) -> Series:
    """outer(inner(x)) truncated to min of the two truncation degrees."""
    outer._check(inner)
    n = min(outer.trunc, inner.trunc) + 1
    raw = _poly_compose(outer.base, outer._c[:n], inner._c[:n], n, outer._work_prec(inner))
    if outer.prec is None:
        return Series(outer.base, raw)
    precs = outer._combine_prec(inner)
    raw = [outer.base._canon(c, kp) for c, kp in zip(raw, precs)]
    return Series(outer.base, raw, precs)


def s_comp_inverse(u: Series) -> Series:
    """The compositional inverse, by Newton iteration h <- h - (u(h) - x)/u'(h)."""
    base = u.base
    if not _is_unit_raw(base, u._c[1]):
        raise NotInvertible("linear coefficient is not a unit")
    prec = u._work_prec()
    n = u.trunc + 1
    du = _poly_derivative(base, u._c, prec)
    h = [_zero_raw(base), _raw_inv(base, u._c[1], prec)]
    m = 2
    while m < n:
        m = min(2 * m - 1, n)
        h = h + [_zero_raw(base)] * (m - len(h))
        uh = _poly_compose(base, u._c[:m], h, m, prec)
        uh[1] = _raw_sub(base, uh[1], _one_raw(base), prec)
        duh = _poly_compose(base, du[:m], h, m, prec)
        step = _poly_mul(base, uh, _poly_reciprocal(base, duh, m, prec), m, prec)
        h = [_raw_sub(base, x, y, prec) for x, y in zip(h, step)]
    h = h[:n] + [_zero_raw(base)] * (n - len(h))
    if u.prec is None:
        return Series(base, h)
    precs = tuple(accumulate((u.prec[0],) + u.prec[1:], min))
    precs = (precs[1] if len(precs) > 1 else precs[0],) + precs[1:]
    return Series(base, [base._canon(c, kp) for c, kp in zip(h, precs)], precs)


def s_derivative(a: Series) -> tuple:
    """Formal derivative as a coefficient tuple d_0, ..., d_{D-1} (d_0 = a'(0))."""
    prec = a._work_prec()
    raw = _poly_derivative(a.base, a._c, prec)
    if a.prec is None:
        return tuple(FqElem(a.base, c) for c in raw)
    return tuple(OKElem(a.base, a.base._canon(c, kp), kp) for c, kp in zip(raw, a.prec[1:]))


def s_iterate(a: Series, n: int) -> Series:
    """a composed with itself n times (identity for n = 0), by repeated squaring."""
    if n < 0:
        raise ValidationError("iteration count must be >= 0")
    result = Series.x(a.base, a.trunc, a.min_prec())
    base = a
    while n:
        if n & 1:
            result = s_compose(base, result)
        n >>= 1
        if n:
            base = s_compose(base, base)
    return result


def wideg(a: Series):
    """Weierstrass degree: first unit coefficient (first nonzero one over F_q)."""
    for k in range(1, a.trunc + 1):
        c = a._c[k]
        if a.prec is None:
            if any(c):
                return k
        elif a.prec[k] >= 1 and _is_unit_raw(a.base, c):
            return k
    return INFINITE_AT_PRECISION


def s_reduce(a: Series) -> Series:
    """Coefficientwise reduction modulo the maximal ideal."""
    if a.prec is None:
        return a
    if a.trunc and min(a.prec[1:]) < 1:
        raise InsufficientPrecision("a coefficient carries no pi-adic digits")
    field = a.base.residue_field
    f, p = a.base.f, a.base.p
    return Series(field, [tuple(x % p for x in c[:f]) for c in a._c])


def s_lift(a: Series, ring: RingSpec, prec: int | None = None) -> Series:
    """Canonical lift of a series over F_q to O_K (digits 0..p-1)."""
    if a.prec is not None:
        raise ValidationError("series is already over O_K")
    if ring.residue_field != a.base:
        raise RingMismatch("residue field does not match the ring")
    prec = ring.prec if prec is None else prec
    pad = (0,) * (ring.f * (ring.e - 1))
    raw = [ring._canon(c + pad, prec) for c in a._c]
    return Series(ring, raw, (prec,) * len(raw))


def powers(a: Series, kmax: int) -> list:
    """[a^0 (as None), a, a^2, ..., a^kmax] truncated to a.trunc."""
    out = [None, a]
    for _ in range(2, kmax + 1):
        out.append(s_mul(out[-1], a))
    return out


# ----------------------------------------------------------------------------
# multivariate truncated polynomials (small total degree)

class MPoly:
    """Sparse polynomial in ``nvars`` variables truncated at total degree T."""

    __slots__ = ("base", "nvars", "trunc", "terms", "prec")

    def __init__(self, base, nvars: int, trunc: int, terms: dict, prec=None):
        self.base = base
        self.nvars = nvars
        self.trunc = trunc
        self.prec = prec if isinstance(base, RingSpec) else None
        self.terms = {k: v for k, v in terms.items() if any(v) and sum(k) <= trunc}

    @classmethod
    def var(cls, base, nvars, i, trunc, prec=None):
        mono = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(base, nvars, trunc, {mono: _one_raw(base)}, prec)

    def __add__(self, other):
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = _raw_add(self.base, terms[k], v, self.prec) if k in terms else v
        return MPoly(self.base, self.nvars, min(self.trunc, other.trunc), terms, self.prec)

    def __sub__(self, other):
        neg = {k: _canon(self.base, [-x for x in v], self.prec) for k, v in other.terms.items()}
        return self + MPoly(self.base, other.nvars, other.trunc, neg, self.prec)

    def __mul__(self, other):
        trunc = min(self.trunc, other.trunc)
        terms = {}
        for k1, v1 in self.terms.items():
            d1 = sum(k1)
            for k2, v2 in other.terms.items():
                if d1 + sum(k2) > trunc:
                    continue
                k = tuple(x + y for x, y in zip(k1, k2))
                v = _raw_mul(self.base, v1, v2, self.prec)
                terms[k] = _raw_add(self.base, terms[k], v, self.prec) if k in terms else v
        return MPoly(self.base, self.nvars, trunc, terms, self.prec)

    def scale(self, raw):
        return MPoly(self.base, self.nvars, self.trunc,
                     {k: _raw_mul(self.base, v, raw, self.prec) for k, v in self.terms.items()},
                     self.prec)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, MPoly) and (self - other).is_zero()

    __hash__ = None


class BiSeries:
    """F(x, y) = sum c_ij x^i y^j over 1 <= i + j <= T (no constant term)."""

    __slots__ = ("base", "trunc", "terms", "prec")

    def __init__(self, base, trunc: int, terms: dict, prec: int | None = None):
        if (0, 0) in terms and any(terms[(0, 0)]):
            raise ValidationError("bivariate series have no constant term")
        self.base = base
        self.trunc = trunc
        self.prec = (base.prec if prec is None else prec) if isinstance(base, RingSpec) else None
        self.terms = {k: _canon(base, v, self.prec) for k, v in terms.items()
                      if k != (0, 0) and sum(k) <= trunc}
        self.terms = {k: v for k, v in self.terms.items() if any(v)}

    @classmethod
    def from_rows(cls, base, rows, trunc: int | None = None, prec=None):
        """rows[i][j] is c_{i,j}; row 0 starts at j = 0 whose entry must be zero."""
        trunc = (len(rows) - 1) if trunc is None else trunc
        terms = {}
        for i, row in enumerate(rows):
            for j, c in enumerate(row):
                raw, _ = _to_raw(base, c, prec)
                if (i, j) == (0, 0):
                    if any(raw):
                        raise ValidationError("bivariate series have no constant term")
                    continue
                terms[(i, j)] = raw
        return cls(base, trunc, terms, prec)

    def rows(self) -> list:
        """Triangular row-major layout: row i lists c_{i,0..T-i}."""
        zero = _zero_raw(self.base)
        return [[self.coeff_raw(i, j) if (i, j) != (0, 0) else zero
                 for j in range(self.trunc - i + 1)] for i in range(self.trunc + 1)]

    def coeff_raw(self, i, j):
        return self.terms.get((i, j), _zero_raw(self.base))

    def coeff(self, i, j):
        return _elem(self.base, self.coeff_raw(i, j), self.prec)

    def to_mpoly(self, nvars=2, idx=(0, 1)) -> MPoly:
        terms = {}
        for (i, j), v in self.terms.items():
            mono = [0] * nvars
            mono[idx[0]] += i
            mono[idx[1]] += j
            terms[tuple(mono)] = v
        return MPoly(self.base, nvars, self.trunc, terms, self.prec)

    def __eq__(self, other):
        return (isinstance(other, BiSeries) and self.trunc == other.trunc
                and _same_base(self.base, other.base) and self.to_mpoly() == other.to_mpoly())

    __hash__ = None

    def swap(self) -> "BiSeries":
        return BiSeries(self.base, self.trunc, {(j, i): v for (i, j), v in self.terms.items()},
                        self.prec)

    def __repr__(self):
        parts = []
        for (i, j) in sorted(self.terms, key=lambda k: (sum(k), -k[0])):
            c = repr(_elem(self.base, self.terms[(i, j)], self.prec)).split(" (mod")[0]
            mon = "*".join(s for s in (("x" if i == 1 else f"x^{i}") if i else "",
                                       ("y" if j == 1 else f"y^{j}") if j else "") if s)
            parts.append(mon if c == "1" else f"{c}*{mon}")
        return (" + ".join(parts) or "0") + f" + O(deg {self.trunc + 1})"


def mpoly_substitute(F: MPoly, values: list) -> MPoly:
    """F(values[0], values[1], ...) with each value an MPoly without constant term."""
    trunc = min([F.trunc] + [v.trunc for v in values])
    nv = values[0].nvars
    cache = {}

    def power(i, k):
        if (i, k) not in cache:
            if k == 0:
                cache[(i, k)] = MPoly(F.base, nv, trunc, {(0,) * nv: _one_raw(F.base)}, F.prec)
            else:
                cache[(i, k)] = power(i, k - 1) * values[i]
        return cache[(i, k)]

    out = MPoly(F.base, nv, trunc, {}, F.prec)
    for mono, c in F.terms.items():
        term = MPoly(F.base, nv, trunc, {(0,) * nv: c}, F.prec)
        for i, k in enumerate(mono):
            if k:
                term = term * power(i, k)
        out = out + term
    return out


def bi_substitute(F: BiSeries, a: Series, b: Series) -> Series:
    """F(a(x), b(x)), exact through degree min(D_a, D_b, T)."""
    a._check(b)
    if not _same_base(F.base, a.base):
        raise RingMismatch("bivariate series over a different ring")
    n = min(a.trunc, b.trunc, F.trunc)
    a, b = a.truncate(n), b.truncate(n)
    prec = min(x for x in (F.prec, a.min_prec(), b.min_prec()) if x is not None) if F.prec else None
    if prec is not None:
        a, b = a.with_prec(prec), b.with_prec(prec)
    maxi = max((i for i, _ in F.terms), default=0)
    maxj = max((j for _, j in F.terms), default=0)
    pa = powers(a, maxi) if maxi else [None]
    pb = powers(b, maxj) if maxj else [None]
    acc = Series.zero(F.base, n, prec)
    for (i, j), c in F.terms.items():
        if i and j:
            term = s_mul(pa[i], pb[j])
        else:
            term = pa[i] if i else pb[j]
        acc = acc + term.scale(_elem(F.base, c, prec))
    return acc
