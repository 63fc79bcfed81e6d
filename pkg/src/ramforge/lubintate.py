"""Lubin-Tate formal groups over O_K and their endomorphisms.

Everything is produced by one recursion.  For Frobenius series f_l, f_r and
a prescribed linear term, the unique phi with f_l(phi) = phi(f_r) is solved
degree by degree:

    phi_k (a_l - a_r^k) = sum_{j<k} phi_j (f_r^j)_k - sum_{m>=2} f_l[m] (phi^m)_k

where a_l, a_r are the linear coefficients.  The divisor has valuation one,
so each step is an exact division by pi followed by a unit inverse.

Two solvers implement it.  The sparse solver handles the two-term shape
a x + b x^q: (f^j)_k then has a single binomial term, and the powers
phi^2..phi^q are extended one coefficient at a time (a matrix product per
degree).  It needs only 1 + floor(log_q D) reserve pi-digits, because the
only undamped error path is phi_j -> phi_{qj}.  The generic solver recomputes
the degree-k residual by composition and reserves one digit per degree.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    HypothesisError,
    InsufficientPrecision,
    NotDivisible,
    NotFrobenius,
    PrecisionExhausted,
    ResidualError,
    ValidationError,
)
from .ring import OKElem, RingSpec, pi_divide, unit_inverse
from .series import (
    BiSeries,
    MPoly,
    Series,
    mpoly_substitute,
    s_compose,
    s_mul,
    s_reduce,
)


# ----------------------------------------------------------------------------
# Frobenius series

class FrobeniusSeries:
    """A polynomial f with f = (uniformizer) x mod x^2 and f = x^q mod pi."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingSpec, terms: dict):
        self.ring = ring
        self.terms = {}
        for k, c in sorted(terms.items()):
            if k < 1:
                raise ValidationError("Frobenius series have no constant term")
            c = ring(c) if not isinstance(c, OKElem) else c
            if not c.is_zero():
                self.terms[k] = c
        self._validate()

    @classmethod
    def canonical(cls, ring: RingSpec, prec: int | None = None) -> "FrobeniusSeries":
        """pi x + x^q."""
        prec = ring.prec if prec is None else prec
        return cls(ring, {1: ring.pi(prec), ring.q: ring.one(prec)})

    @classmethod
    def from_series(cls, s: Series) -> "FrobeniusSeries":
        return cls(s.base, {k: s[k] for k in range(1, s.trunc + 1) if any(s._c[k])})

    def _validate(self):
        q = self.ring.q
        lin = self.terms.get(1)
        if lin is None or lin.valuation() != 1:
            raise NotFrobenius("linear coefficient must be a uniformizer")
        if q not in self.terms or self.terms[q].valuation() != 0:
            raise NotFrobenius(f"degree-{q} coefficient must be a unit")
        from .ring import residue_reduce
        if not (residue_reduce(self.terms[q]) - 1).is_zero():
            raise NotFrobenius(f"f must reduce to x^{q}")
        for k, c in self.terms.items():
            if k != q and c.valuation() < 1:
                raise NotFrobenius(f"coefficient {k} is not in the maximal ideal")

    @property
    def linear(self) -> OKElem:
        return self.terms[1]

    @property
    def degree(self) -> int:
        return max(self.terms)

    def sparse_shape(self):
        """(a, b, q) when f = a x + b x^q exactly, else None."""
        if len(self.terms) == 2:
            return self.terms[1], self.terms[self.ring.q], self.ring.q
        return None

    def series(self, trunc: int, prec: int | None = None) -> Series:
        prec = self.ring.prec if prec is None else prec
        return Series.monomials(self.ring, {k: c.promote(prec) for k, c in self.terms.items()},
                                trunc, prec)

    def __eq__(self, other):
        return (isinstance(other, FrobeniusSeries) and self.ring.compatible(other.ring)
                and self.terms.keys() == other.terms.keys()
                and all(self.terms[k] == other.terms[k] for k in self.terms))

    __hash__ = None

    def __repr__(self):
        return f"FrobeniusSeries({self.series(self.degree)!r})"


# ----------------------------------------------------------------------------
# solver helpers

def sparse_reserve(q: int, deg: int) -> int:
    """Extra pi-digits the sparse solver needs to deliver the target precision."""
    loss, k = 0, q
    while k <= deg:
        loss += 1
        k *= q
    return loss + 1


def _divide_step(ring, acc_raw, divisor_inv, P):
    """acc / pi * divisor_inv, with acc known mod pi^P (result as rep mod pi^P)."""
    try:
        quot = pi_divide(OKElem(ring, acc_raw, P), 1)
    except NotDivisible as exc:
        raise ResidualError("discrepancy not divisible by pi") from exc
    return ring._canon(ring._mul_raw(quot._v, divisor_inv, P), P)


def _divisor_inverses(ring, a_l, a_r, deg, P):
    """((a_l - a_r^k) / pi)^{-1} for k = 2..deg."""
    out = {}
    ar_k = a_r.promote(P)
    al = a_l.promote(P)
    for k in range(2, deg + 1):
        ar_k = ar_k * a_r.promote(P)
        diff = al - ar_k
        if diff.valuation() != 1:
            raise HypothesisError("a_l - a_r^k must have valuation one")
        out[k] = unit_inverse(_lift_unit(ring, diff, P))._v
    return out


def _lift_unit(ring, diff, P):
    u = pi_divide(diff, 1)
    return OKElem(ring, ring._canon(u._v, P), P)


def _solve_sparse(ring, lin, left, right, deg, P):
    """Sparse solver; returns raw coefficients 0..deg at precision P."""
    a_l, b_l, m = left
    a_r, b_r, m_r = right
    if m != m_r:
        raise ValidationError("Frobenius series of different degrees")
    e, f = ring.e, ring.f
    ef = e * f
    mod = ring._moduli(P)[0]
    bound = mod * mod * (deg + 1) * ef
    dtype = np.int64 if bound < 2 ** 62 else object
    pw = [None] + [np.zeros((deg + 1, ef), dtype=dtype) for _ in range(m)]
    zero = (0,) * ef
    lin_raw = ring(lin, P)._v
    pw[1][1] = lin_raw
    inv = _divisor_inverses(ring, a_l, a_r, deg, P)
    ar_pows = [ring.one(P)._v]
    for _ in range(1, P + 1):
        ar_pows.append(ring._mul_raw(ar_pows[-1], a_r.promote(P)._v, P))
    br = b_r.promote(P)._v
    br_pows = [ring.one(P)._v]
    for _ in range(1, deg // m + 1):
        br_pows.append(ring._mul_raw(br_pows[-1], br, P))
    bl = b_l.promote(P)._v
    neg_bl = ring._canon([-x for x in bl], P)
    pairs = [(i1 * f + j1, i2 * f + j2, i1 + i2, j1 + j2)
             for i1 in range(e) for j1 in range(f) for i2 in range(e) for j2 in range(f)]

    def block(k, j):
        blk = pw[1][1:k].T @ pw[j - 1][k - 1:0:-1]
        if ef == 1:
            return (int(blk[0, 0]) % mod,)
        rows = [[0] * (2 * f - 1) for _ in range(2 * e - 1)]
        for c1, c2, r, s in pairs:
            rows[r][s] += int(blk[c1, c2])
        return ring._reduce_poly(rows, P)

    for k in range(2, deg + 1):
        for j in range(2, m + 1):
            pw[j][k] = block(k, j)
        acc = list(ring._mul_raw(neg_bl, tuple(int(x) for x in pw[m][k]), P))
        for i in range(min(P, k)):
            if (k - i) % m:
                continue
            t = (k - i) // m
            jj = i + t
            if t < 1 or jj >= k:
                continue
            phi_j = tuple(int(x) for x in pw[1][jj])
            if not any(phi_j):
                continue
            c = math.comb(jj, t) % mod
            if not c:
                continue
            coef = ring._mul_raw(ar_pows[i], br_pows[t], P)
            coef = ring._canon([c * x for x in coef], P)
            term = ring._mul_raw(phi_j, coef, P)
            acc = [x + y for x, y in zip(acc, term)]
        pw[1][k] = _divide_step(ring, ring._canon(acc, P), inv[k], P)
    return [zero] + [tuple(int(x) for x in pw[1][k]) for k in range(1, deg + 1)]


def _solve_generic(ring, lin, fl: FrobeniusSeries, fr: FrobeniusSeries, deg, P):
    """Per-degree residual solver (compositions); raw coefficients at precision P."""
    a_l, a_r = fl.linear, fr.linear
    inv = _divisor_inverses(ring, a_l, a_r, deg, P)
    zero = (0,) * (ring.e * ring.f)
    raw = [zero, ring(lin, P)._v] + [zero] * (deg - 1)
    for k in range(2, deg + 1):
        phi = Series(ring, raw[:k + 1], (P,) * (k + 1))
        resid = s_compose(fl.series(k, P), phi) - s_compose(phi, fr.series(k, P))
        neg = ring._canon([-x for x in resid._c[k]], P)
        raw[k] = _divide_step(ring, neg, inv[k], P)
    return raw


def _sparse_compose_right(phi: Series, shape, prec) -> Series:
    """phi(a x + b x^m) mod pi^prec by the binomial expansion."""
    ring = phi.base
    a, b, m = shape
    D = phi.trunc
    a_r, b_r = a.promote(prec)._v, b.promote(prec)._v
    a_pows = [ring.one(prec)._v]
    for _ in range(prec):
        a_pows.append(ring._mul_raw(a_pows[-1], a_r, prec))
    b_pows = [ring.one(prec)._v]
    for _ in range(D // m + 1):
        b_pows.append(ring._mul_raw(b_pows[-1], b_r, prec))
    mod = ring._moduli(prec)[0]
    acc = [[0] * (ring.e * ring.f) for _ in range(D + 1)]
    for j in range(1, D + 1):
        cj = phi._c[j]
        if not any(cj):
            continue
        for t in range(0, j + 1):
            i = j - t
            if i >= prec:
                continue
            deg = i + m * t
            if deg > D:
                break
            c = math.comb(j, t) % mod
            if not c:
                continue
            coef = ring._mul_raw(a_pows[i], b_pows[t], prec)
            term = ring._mul_raw(cj, ring._canon([c * x for x in coef], prec), prec)
            acc[deg] = [x + y for x, y in zip(acc[deg], term)]
    return Series(ring, [ring._canon(c, prec) for c in acc], (prec,) * (D + 1))


def _frob_apply_left(fl: FrobeniusSeries, phi: Series, prec) -> Series:
    """fl(phi) via powers of phi."""
    ring = phi.base
    out = Series.zero(ring, phi.trunc, prec)
    power = phi
    for k in range(1, fl.degree + 1):
        if k > 1:
            power = s_mul(power, phi)
        if k in fl.terms:
            out = out + power.scale(fl.terms[k].promote(prec))
    return out


def univariate_residual(fl, fr, phi: Series, prec: int) -> Series:
    """fl(phi) - phi(fr) with coefficients mod pi^prec."""
    phi = phi.with_prec(prec)
    left = _frob_apply_left(fl, phi, prec)
    shape = fr.sparse_shape()
    if shape is not None and phi.trunc > 128:
        right = _sparse_compose_right(phi, shape, prec)
    else:
        right = s_compose(phi, fr.series(phi.trunc, prec))
    return left - right


def lt_solve(linear, f_left: FrobeniusSeries, f_right, deg: int,
             n_target: int | None = None, method: str = "auto"):
    """The unique series (or bivariate series) with the given linear part intertwining f_left and f_right.

    ``linear`` is an OKElem a (solving for a x + ...) or a pair (a, b) for a
    bivariate a x + b y; in the latter case ``f_right`` is a pair of Frobenius
    series acting on x and y.  The result is known modulo pi^n_target.
    """
    ring = f_left.ring
    n_target = ring.prec if n_target is None else n_target
    if deg < 1 or n_target < 1:
        raise ValidationError("degree and target precision must be >= 1")
    if isinstance(linear, tuple):
        return _lt_solve_bivariate(linear, f_left, f_right, deg, n_target)
    lin = ring(linear, n_target + deg + 1) if isinstance(linear, int) else ring(linear)
    if lin.known_prec < n_target:
        raise InsufficientPrecision("linear coefficient known to less than the target")
    lin = lin.promote(n_target + deg + 1)
    lhs = f_left.linear * lin
    if not (lhs - lin * f_right.linear).with_prec(n_target).is_zero():
        raise HypothesisError("linear part does not intertwine the linear terms")
    shapes = (f_left.sparse_shape(), f_right.sparse_shape())
    use_sparse = (method == "sparse" or method == "auto") and None not in shapes \
        and shapes[0][2] == shapes[1][2]
    if method == "sparse" and not use_sparse:
        raise ValidationError("sparse solver needs two-term Frobenius series")
    if use_sparse:
        work = n_target + sparse_reserve(ring.q, deg)
        raw = _solve_sparse(ring, lin, shapes[0], shapes[1], deg, work)
    else:
        work = n_target + deg
        raw = _solve_generic(ring, lin, f_left, f_right, deg, work)
    phi = Series(ring, [ring._canon(c, n_target) for c in raw], (n_target,) * (deg + 1))
    resid = univariate_residual(f_left, f_right, phi, n_target)
    if not resid.is_zero():
        raise ResidualError("solver residual does not vanish at the target precision")
    return phi


def _lt_solve_bivariate(linear, f_left, f_right, T, n_target):
    ring = f_left.ring
    fx, fy = f_right if isinstance(f_right, tuple) else (f_right, f_right)
    P = n_target + T
    c10, c01 = (ring(c).promote(P) for c in linear)
    al = f_left.linear.promote(P)
    ax, ay = fx.linear.promote(P), fy.linear.promote(P)
    if not ((al - ax) * c10).with_prec(n_target).is_zero() or \
            not ((al - ay) * c01).with_prec(n_target).is_zero():
        raise HypothesisError("linear part does not intertwine the linear terms")
    terms = {(1, 0): c10._v, (0, 1): c01._v}
    X = MPoly.var(ring, 2, 0, T, P)
    Y = MPoly.var(ring, 2, 1, T, P)
    fxp = _frob_mpoly(fx, X, T, P)
    fyp = _frob_mpoly(fy, Y, T, P)
    for k in range(2, T + 1):
        Fk = MPoly(ring, 2, k, terms, P)
        resid = _frob_apply_mpoly(f_left, Fk, P) - mpoly_substitute(Fk, [fxp, fyp])
        for a in range(k + 1):
            b = k - a
            r = resid.terms.get((a, b))
            if r is None:
                continue
            div = al - ax ** a * ay ** b
            if div.valuation() != 1:
                raise HypothesisError("divisor must have valuation one")
            inv = unit_inverse(_lift_unit(ring, div, P))._v
            terms[(a, b)] = _divide_step(ring, ring._canon([-x for x in r], P), inv, P)
    F = BiSeries(ring, T, terms, n_target)
    resid = bivariate_residual(f_left, (fx, fy), F, n_target)
    if not resid.is_zero():
        raise ResidualError("bivariate solver residual does not vanish")
    return F


def _frob_mpoly(fr: FrobeniusSeries, var: MPoly, T, P):
    out = MPoly(var.base, var.nvars, T, {}, P)
    power = var
    for k in range(1, min(fr.degree, T) + 1):
        if k > 1:
            power = power * var
        if k in fr.terms:
            out = out + power.scale(fr.terms[k].promote(P)._v)
    return out


def _frob_apply_mpoly(fl: FrobeniusSeries, G: MPoly, P):
    out = MPoly(G.base, G.nvars, G.trunc, {}, P)
    power = G
    for k in range(1, min(fl.degree, G.trunc) + 1):
        if k > 1:
            power = power * G
        if k in fl.terms:
            out = out + power.scale(fl.terms[k].promote(P)._v)
    return out


def bivariate_residual(fl, fr_pair, F: BiSeries, prec: int) -> MPoly:
    """fl(F(x,y)) - F(fx(x), fy(y)) through total degree T, mod pi^prec."""
    ring = F.base
    fx, fy = fr_pair
    T = F.trunc
    G = F.to_mpoly()
    G = MPoly(ring, 2, T, {k: ring._canon(v, prec) for k, v in G.terms.items()}, prec)
    X = MPoly.var(ring, 2, 0, T, prec)
    Y = MPoly.var(ring, 2, 1, T, prec)
    return _frob_apply_mpoly(fl, G, prec) - mpoly_substitute(
        G, [_frob_mpoly(fx, X, T, prec), _frob_mpoly(fy, Y, T, prec)])


# ----------------------------------------------------------------------------
# formal group laws

class FormalGroupLaw:
    """The Lubin-Tate group of a Frobenius series, with an endomorphism cache."""

    def __init__(self, frob: FrobeniusSeries, F: BiSeries, n_target: int):
        self.ring = frob.ring
        self.frob = frob
        self.F = F
        self.n_target = n_target
        self._endo_cache = {}
        self._lock = threading.Lock()

    @property
    def trunc(self) -> int:
        return self.F.trunc

    def endo(self, alpha, deg: int, n_target: int | None = None) -> Series:
        """[alpha]_F to degree ``deg``, taking alpha's canonical representative as exact."""
        n_target = self.n_target if n_target is None else n_target
        alpha = self.ring(alpha)
        key = (alpha._v, deg, n_target)
        with self._lock:
            hit = self._endo_cache.get(key)
        if hit is not None:
            return hit
        # alpha is treated as exact: re-encode with ample precision
        exact = OKElem(self.ring, alpha._v, n_target + deg + 1)
        result = lt_solve(exact, self.frob, self.frob, deg, n_target)
        with self._lock:
            return self._endo_cache.setdefault(key, result)

    def cached_endos(self) -> dict:
        with self._lock:
            return dict(self._endo_cache)

    def evaluate(self, a: Series, b: Series) -> Series:
        from .series import bi_substitute
        return bi_substitute(self.F, a, b)

    def check_axioms(self) -> dict:
        """Unit, commutativity, associativity and endomorphism checks to degree T."""
        ring, T, prec = self.ring, self.trunc, self.n_target
        G = self.F.to_mpoly()
        results = {}
        x_only = {k: v for k, v in G.terms.items() if k[1] == 0}
        y_only = {k: v for k, v in G.terms.items() if k[0] == 0}
        one = ring.one(prec)._v
        results["unit_x"] = x_only == {(1, 0): one}
        results["unit_y"] = y_only == {(0, 1): one}
        results["commutative"] = self.F == self.F.swap()
        X, Y, Z = (MPoly.var(ring, 3, i, T, prec) for i in range(3))
        G2 = self.F.to_mpoly()
        left = mpoly_substitute(G2, [mpoly_substitute(G2, [X, Y]), Z])
        right = mpoly_substitute(G2, [X, mpoly_substitute(G2, [Y, Z])])
        results["associative"] = left == right
        resid = bivariate_residual(self.frob, (self.frob, self.frob), self.F, prec)
        results["endomorphism"] = resid.is_zero()
        return results

    def __repr__(self):
        return f"FormalGroupLaw({self.F!r})"


def lt_group(f: FrobeniusSeries, T: int, n_target: int | None = None) -> FormalGroupLaw:
    """The Lubin-Tate group law of ``f`` to total degree T, axioms verified."""
    n_target = f.ring.prec if n_target is None else n_target
    one = f.ring.one(n_target + T)
    F = lt_solve((one, one), f, (f, f), T, n_target)
    G = FormalGroupLaw(f, F, n_target)
    failed = [k for k, ok in G.check_axioms().items() if not ok]
    if failed:
        raise ResidualError(f"group law axioms failed: {failed}")
    return G


def lt_endo(G: FormalGroupLaw, alpha, deg: int, n_target: int | None = None) -> Series:
    return G.endo(alpha, deg, n_target)


# ----------------------------------------------------------------------------
# Lazard congruence and reduction

@dataclass
class LazardResult:
    """Outcome of comparing F with x + y + C/den.

    ``sign_convention`` is +1 for den = Pi - Pi^q and -1 for den = Pi^q - Pi,
    decided on the degree-q part (the part the comparison lemma pins down).
    ``matches`` says whether that convention also agrees through ``through``.
    """

    matches: bool
    sign_convention: int
    through: int
    first_mismatch: int | None


def lazard_terms(G: FormalGroupLaw, sign: int) -> dict:
    """x + y + C/den with C = (x+y)^q - x^q - y^q; den = Pi - Pi^q (sign +1) or Pi^q - Pi (-1)."""
    ring, q, prec = G.ring, G.ring.q, G.n_target
    wide = prec + 2 * ring.e
    Pi = G.frob.linear.promote(wide)
    den = Pi - Pi ** q if sign > 0 else Pi ** q - Pi
    den_unit_inv = unit_inverse(_lift_unit(ring, den, wide))
    terms = {(1, 0): ring.one(prec)._v, (0, 1): ring.one(prec)._v}
    for i in range(1, q):
        c = ring(math.comb(q, i), wide)
        quot = pi_divide(c, 1) * den_unit_inv.with_prec(wide - 1)
        terms[(i, q - i)] = ring._canon(quot._v, prec)
    return {k: v for k, v in terms.items() if any(v)}


def _first_mismatch(G: FormalGroupLaw, expect: dict, through: int):
    for deg in range(1, through + 1):
        got = {k: v for k, v in G.F.terms.items() if sum(k) == deg}
        want = {k: v for k, v in expect.items() if sum(k) == deg}
        if got != want:
            return deg
    return None


def lazard_check(G: FormalGroupLaw, through: int | None = None) -> LazardResult:
    """Compare F with the Lazard congruence under both signs of the denominator.

    ``through`` defaults to q + 1, i.e. the congruence modulo total degree q + 2.
    """
    q = G.ring.q
    through = q + 1 if through is None else through
    if G.trunc < through:
        raise ValidationError(f"need T >= {through}")
    mism = {s: _first_mismatch(G, lazard_terms(G, s), through) for s in (+1, -1)}
    at_q = [s for s in (+1, -1) if mism[s] is None or mism[s] > q]
    if len(at_q) != 1:
        from .errors import NeitherMatches
        raise NeitherMatches(f"degree-{q} part matched by {len(at_q)} conventions")
    sign = at_q[0]
    return LazardResult(mism[sign] is None, sign, through, mism[sign])


@dataclass
class ReducedGroup:
    F: BiSeries
    endos: dict = field(default_factory=dict)


def frobenius_factor(gbar: Series, t: int) -> Series:
    """gamma with gbar(x) = gamma(x^(q^t)); raises if gbar has other support."""
    q = gbar.base.q
    step = q ** t
    for k in range(1, gbar.trunc + 1):
        if k % step and any(gbar._c[k]):
            raise NotFrobenius(f"degree {k} is not a multiple of {step}")
    n = gbar.trunc // step
    if n < 1:
        raise InsufficientPrecision("truncation below q^t")
    return Series(gbar.base, [gbar._c[j * step] for j in range(n + 1)])


def reduce_bi(F: BiSeries) -> BiSeries:
    if F.prec is not None and F.prec < 1:
        raise InsufficientPrecision("bivariate series carries no pi-adic digits")
    fld = F.base.residue_field
    f, p = F.base.f, F.base.p
    return BiSeries(fld, F.trunc, {k: tuple(x % p for x in v[:f]) for k, v in F.terms.items()})


def group_reduce(G: FormalGroupLaw) -> ReducedGroup:
    """Reduction of F and of every cached endomorphism, with the x^(q^t) shape asserted."""
    out = ReducedGroup(reduce_bi(G.F))
    for (raw, deg, prec), series in sorted(G.cached_endos().items(), key=lambda kv: repr(kv[0])):
        alpha = OKElem(G.ring, raw, prec)
        red = s_reduce(series)
        t = alpha.valuation()
        if isinstance(t, int) and t < prec and G.ring.q ** t <= red.trunc:
            frobenius_factor(red, t)
        out.endos[raw] = red
    return out


def reduce_endo(G: FormalGroupLaw, alpha, deg: int) -> Series:
    """[alpha]_F modulo the maximal ideal (solved at target precision 1)."""
    return s_reduce(G.endo(alpha, deg, 1))


def multiplicative_frobenius(ring: RingSpec) -> FrobeniusSeries:
    """2x + x^2 over Z_2, whose group law is x + y + xy."""
    if (ring.p, ring.f, ring.e) != (2, 1, 1):
        raise ValidationError("the multiplicative Frobenius series lives over Z_2")
    return FrobeniusSeries(ring, {1: ring(2), 2: ring(1)})
