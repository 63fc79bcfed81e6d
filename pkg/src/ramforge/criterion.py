"""Executable forms of the ramification criteria: height, Sen's congruence,
the p^d difference-ratio test, the closed form, and the wideg predictors."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    IDENTITY_AT_PRECISION,
    HypothesisError,
    InsufficientPrecision,
    NoMatchingM,
    NotIntegral,
    NotPPower,
    NotStable,
    PrecisionExhausted,
    TooFewEntries,
    ValidationError,
    is_limit,
)
from .lubintate import FormalGroupLaw, reduce_endo
from .nottingham import NottElem, RamProfile, profile_from_iterates, ram_number
from .ring import RingSpec
from .series import Series, s_iterate, wideg

CHAR_ZERO_CONSISTENT = "CHAR_ZERO_CONSISTENT"
CHAR_P_INDICATED = "CHAR_P_INDICATED"
INCONCLUSIVE = "INCONCLUSIVE"


def log_p_exact(n: int, p: int):
    """k with p^k = n, or None."""
    if n < 1:
        return None
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k if n == 1 else None


def _values(profile) -> tuple:
    if isinstance(profile, RamProfile):
        return profile.finite_prefix()
    out = []
    for v in profile:
        if is_limit(v):
            break
        out.append(int(v))
    return tuple(out)


# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class HeightValue:
    value: Fraction

    @property
    def is_integer(self) -> bool:
        return self.value.denominator == 1

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator


def height(g: Series, ring: RingSpec | None = None) -> HeightValue:
    """e * log_p(wideg g) / v_K(g'(0)) for a stable noninvertible g over O_K."""
    ring = g.base if ring is None else ring
    if not g.is_ok:
        raise ValidationError("height is defined for series over O_K")
    lin = g[1]
    v = lin.valuation()
    if is_limit(v) or v == 0 or v >= lin.known_prec:
        raise NotStable(f"v_K(g'(0)) = {v} is not in (0, {lin.known_prec})")
    w = wideg(g)
    if is_limit(w):
        raise InsufficientPrecision("INFINITE_AT_PRECISION: no unit coefficient within truncation")
    k = log_p_exact(w, ring.p)
    if k is None:
        raise NotPPower(f"wideg {w} is not a power of {ring.p}")
    return HeightValue(Fraction(ring.e * k, v))


def sen_check(profile, p: int | None = None) -> bool:
    """i_n = i_{n-1} mod p^n for consecutive finite entries."""
    if p is None:
        p = profile.p
    vals = _values(profile)
    if len(vals) < 2:
        raise TooFewEntries("need at least two finite entries")
    return all((vals[n] - vals[n - 1]) % p ** n == 0 for n in range(1, len(vals)))


def lower_bound_check(profile, p: int | None = None) -> bool:
    """i_n >= 1 + p + ... + p^n."""
    if p is None:
        p = profile.p
    vals = _values(profile)
    return all(v >= sum(p ** j for j in range(n + 1)) for n, v in enumerate(vals))


@dataclass(frozen=True)
class CriterionReport:
    profile: tuple
    d_expected: int
    kappa_found: int | None
    ratio_values: tuple
    verdict: str
    lambda_observed: int | None


def difference_ratios(vals) -> tuple:
    out = []
    for n in range(len(vals) - 2):
        den = vals[n + 1] - vals[n]
        if den == 0:
            raise ValidationError("profile is not strictly increasing")
        out.append(Fraction(vals[n + 2] - vals[n + 1], den))
    return tuple(out)


def ratio_check(profile, d: int, p: int | None = None) -> CriterionReport:
    """Consecutive difference ratios against p^d, with the least kappa from which they hold."""
    if p is None:
        p = profile.p
    vals = _values(profile)
    if len(vals) < 3:
        raise TooFewEntries("need at least three finite entries")
    ratios = difference_ratios(vals)
    target = Fraction(p ** d)
    kappa = None
    for k in range(len(ratios)):
        if all(r == target for r in ratios[k:]):
            kappa = k
            break
    tail = ratios[-1]
    lam = None
    if tail.denominator == 1:
        lam = log_p_exact(tail.numerator, p)
    if kappa is not None:
        verdict = CHAR_ZERO_CONSISTENT
    elif lam is not None:
        verdict = INCONCLUSIVE
    else:
        verdict = CHAR_P_INDICATED
    return CriterionReport(vals, d, kappa, ratios, verdict, lam)


def closed_form_predict(i_k: int, i_k1: int, d: int, p: int, n: int, kappa: int = 0) -> int:
    """i_kappa + (p^(d(n-kappa)) - 1)/(p^d - 1) * (i_{kappa+1} - i_kappa)."""
    if n < kappa:
        raise ValidationError("n must be >= kappa")
    num = (p ** (d * (n - kappa)) - 1) * (i_k1 - i_k)
    den = p ** d - 1
    if num % den:
        raise NotIntegral("closed form is not an integer")
    return i_k + num // den


def predict_in(ell: int, n: int, ring: RingSpec) -> int:
    """q^(l + n e) - 1, valid for l > e/(p-1)."""
    if ell * (ring.p - 1) <= ring.e:
        raise HypothesisError(f"l = {ell} must exceed e/(p-1) = {Fraction(ring.e, ring.p - 1)}")
    if n < 0:
        raise ValidationError("n must be >= 0")
    return ring.q ** (ell + n * ring.e) - 1


def findin_predict(g: Series, u: Series, n: int, R: int = 0) -> int:
    """wideg(g^m) - 1 where m v(g'(0)) = v(u'(0)^(p^n) - 1)."""
    if n < R:
        raise ValidationError(f"n = {n} below the configured threshold R = {R}")
    ring = g.base
    s = g[1].valuation()
    if is_limit(s) or s == 0:
        raise NotStable("g must be stable noninvertible")
    a = u[1]
    if a.valuation() != 0:
        raise HypothesisError("u must be invertible")
    t = (a ** (ring.p ** n) - 1).valuation()
    if is_limit(t):
        raise InsufficientPrecision("u'(0)^(p^n) - 1 vanishes at the working precision")
    if t % s:
        raise NoMatchingM(f"{t} is not a multiple of {s}")
    m = t // s
    w = wideg(g)
    if is_limit(w):
        raise InsufficientPrecision("INFINITE_AT_PRECISION: wideg(g) beyond truncation")
    if w ** m <= g.trunc:
        wm = wideg(s_iterate(g, m))
        if is_limit(wm):
            raise InsufficientPrecision("INFINITE_AT_PRECISION: wideg(g^m) beyond truncation")
    else:
        # wideg is multiplicative under composition
        wm = w ** m
    return wm - 1


# ----------------------------------------------------------------------------
# Lubin-Tate profiles

def lt_ram_profile(G: FormalGroupLaw, alpha, n_max: int, trunc: int | None = None,
                   max_trunc: int = 4096) -> RamProfile:
    """i_n of the reduction of [alpha]_F, from the reductions of [alpha^(p^n)]_F.

    With ``trunc`` None the truncation starts at 64 and doubles (up to
    ``max_trunc``) until every i_n is visible; otherwise it is fixed and
    entries beyond it are reported as precision limits.
    """
    ring = G.ring
    alpha = ring(alpha)
    if alpha.valuation() != 0:
        raise HypothesisError("alpha must be a unit")
    adaptive = trunc is None
    D = 64 if adaptive else trunc
    while True:
        iterates = []
        for n in range(n_max + 1):
            power = alpha ** (ring.p ** n)
            iterates.append(NottElem(reduce_endo(G, power, D)))
        profile = profile_from_iterates(iterates)
        first = ram_number(iterates[0])
        if not adaptive or profile.complete or first is IDENTITY_AT_PRECISION:
            return profile
        if D >= max_trunc:
            raise PrecisionExhausted(f"i_{n_max} not visible below degree {max_trunc}")
        D = min(2 * D, max_trunc)


def criterion_check(G: FormalGroupLaw, alpha, n_max: int, trunc: int | None = None) -> CriterionReport:
    profile = lt_ram_profile(G, alpha, n_max, trunc)
    return ratio_check(profile, G.ring.d, G.ring.p)
