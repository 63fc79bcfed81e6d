"""Lifting commuting pairs from F_q to O_K one pi-adic digit at a time.

Level spaces are finite linear problems over F_q: for a commuting pair
(zeta, mu) with zeta noninvertible of Weierstrass degree q^s,

    Z  : d(mu(x)) = d(x) mu'(zeta(x)) + w(zeta(x))
    Z^o: Z with d'(0) = w'(0) = 0
    B  : d = -theta(zeta),  w = mu' theta - theta(mu),  theta in x^2 F_q[[x]]

truncated to d-degrees <= D and w-degrees <= D // q^s.  ``rectify``
conjugates a stable series g into [beta]_F using a stabilizer oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import (
    DegenerateWindow,
    HypothesisError,
    InsufficientPrecision,
    NoncommutingPair,
    NotFrobenius,
    NotInB,
    NotInImage,
    NotPPower,
    NotStable,
    OraclePrecision,
    ReductionMismatch,
    ResidualError,
    ValidationError,
    is_limit,
)
from .linalg import FqTables, in_span, nullspace, rank, solve, span_basis
from .lubintate import FormalGroupLaw, FrobeniusSeries, frobenius_factor, lt_solve
from .ring import FiniteField, FqElem, OKElem, RingSpec, pi_divide, residue_reduce, teichmuller
from .series import Series, s_comp_inverse, s_compose, s_reduce, wideg


@lru_cache(maxsize=None)
def _tables(fld: FiniteField) -> FqTables:
    return FqTables(fld)


def _enc(F: FqTables, s: Series, n: int) -> list:
    """Encoded coefficients 0..n of a series over F_q (zero-padded)."""
    out = [F.encode(c) for c in s._c[:n + 1]]
    return out + [0] * (n + 1 - len(out))


def _mulpoly(F: FqTables, a: list, b: list, n: int) -> list:
    out = [0] * (n + 1)
    add, mul = F.add, F.mul
    for i, x in enumerate(a[:n + 1]):
        if x:
            mx = mul[x]
            for j in range(0, n + 1 - i):
                if b[j]:
                    out[i + j] = add[out[i + j]][mx[b[j]]]
    return out


def _weierstrass_exponent(zeta: Series) -> tuple:
    """(q^s, s) for the Weierstrass degree of zeta."""
    w = wideg(zeta)
    if is_limit(w):
        raise DegenerateWindow("zeta vanishes within the truncation")
    q = zeta.base.q
    s, m = 0, 1
    while m < w:
        m *= q
        s += 1
    if m != w or s == 0:
        raise NotPPower(f"wideg(zeta) = {w} is not a positive power of q = {q}")
    return w, s


class _Pair:
    """Encoded powers of zeta and mu and the composite mu'(zeta) up to degree D."""

    def __init__(self, zeta: Series, mu: Series, D: int):
        if zeta.prec is not None or mu.prec is not None:
            raise ValidationError("level spaces live over F_q")
        if zeta.base != mu.base:
            raise ValidationError("zeta and mu over different fields")
        if D > min(zeta.trunc, mu.trunc):
            raise InsufficientPrecision(f"window {D} exceeds the series truncation")
        F = _tables(zeta.base)
        self.F = F
        self.D = D
        self.qs, self.s = _weierstrass_exponent(zeta)
        if D < self.qs + 2:
            raise DegenerateWindow(f"D = {D} < q^s + 2 = {self.qs + 2}")
        if not any(mu._c[1]):
            raise ValidationError("mu must be invertible")
        z, m = zeta.truncate(D), mu.truncate(D)
        if not s_compose(m, z) == s_compose(z, m):
            raise NoncommutingPair("mu and zeta do not commute to the window")
        self.Dw = D // self.qs
        zc, mc = _enc(F, z, D), _enc(F, m, D)
        self.zeta_pows = [[1] + [0] * D, zc]
        for _ in range(2, self.Dw + 1):
            self.zeta_pows.append(_mulpoly(F, self.zeta_pows[-1], zc, D))
        self.mu_pows = [[1] + [0] * D, mc]
        for _ in range(2, D + 1):
            self.mu_pows.append(_mulpoly(F, self.mu_pows[-1], mc, D))
        p = zeta.base.p
        # mu'(x) as an encoded polynomial
        self.mu_prime = [F.mul[(k + 1) % p][mc[k + 1]] for k in range(D)] + [0]
        # mu'(zeta(x)); zeta^k vanishes below degree k q^s
        mpz = [0] * (D + 1)
        for k in range(0, self.Dw + 1):
            c = self.mu_prime[k]
            if c:
                row = F.mul[c]
                mpz = [F.add[a][row[b]] for a, b in zip(mpz, self.zeta_pows[k])]
        self.mu_prime_zeta = mpz

    def d_column(self, j: int) -> list:
        """Contribution of d_j to d(mu) - d mu'(zeta): mu^j - x^j mu'(zeta)."""
        F, D = self.F, self.D
        shifted = [0] * j + self.mu_prime_zeta[:D + 1 - j]
        return [F.sub(a, b) for a, b in zip(self.mu_pows[j], shifted)]

    def w_column(self, j: int) -> list:
        """Contribution of w_j: -zeta^j."""
        F = self.F
        if j > self.Dw:
            return [0] * (self.D + 1)
        return [F.neg[a] for a in self.zeta_pows[j]]

    def theta_image(self, j: int) -> tuple:
        """(d, w) for theta = x^j, as full encoded polynomials up to D."""
        F, D = self.F, self.D
        d = self.w_column(j)
        shifted = [0] * j + self.mu_prime[:D + 1 - j]
        w = [F.sub(a, b) for a, b in zip(shifted, self.mu_pows[j])]
        return d, w


@dataclass(frozen=True)
class LevelSpace:
    """Echelon bases of Z, Z^o, B in coordinates (d_1..d_D, w_1..w_Dw)."""

    level: int
    zeta: Series
    mu: Series
    window: tuple
    basis_Z: tuple
    basis_Zo: tuple
    basis_B: tuple
    quotient_dim: int
    safe_window: tuple
    safe_quotient_dim: int
    _pair: _Pair = field(repr=False, compare=False, default=None)

    @property
    def dims(self) -> dict:
        return {"Z": len(self.basis_Z), "Zo": len(self.basis_Zo), "B": len(self.basis_B),
                "quotient": self.quotient_dim, "safe_quotient": self.safe_quotient_dim}

    def residual(self, vec) -> list:
        """Coefficients 1..D of d(mu) - d mu'(zeta) - w(zeta)."""
        pair = self._pair
        F, D, Dw = pair.F, pair.D, pair.Dw
        out = [0] * (D + 1)
        for j in range(1, D + 1):
            if vec[j - 1]:
                row = F.mul[vec[j - 1]]
                out = [F.add[a][row[b]] for a, b in zip(out, pair.d_column(j))]
        for j in range(1, Dw + 1):
            if vec[D + j - 1]:
                row = F.mul[vec[D + j - 1]]
                out = [F.add[a][row[b]] for a, b in zip(out, pair.w_column(j))]
        return out[1:]

    def contains(self, vec, space: str = "Zo") -> bool:
        basis = {"Z": self.basis_Z, "Zo": self.basis_Zo, "B": self.basis_B}[space]
        return in_span(self._pair.F, basis, [vec], len(vec))

    def projected_quotient_dim(self, keep_d: int, keep_w: int) -> int:
        """dim Z^o - dim B after restricting to d_1..d_keep_d, w_1..w_keep_w."""
        F, D = self._pair.F, self.window[0]
        n = keep_d + keep_w
        return (rank(F, _project(self.basis_Zo, D, keep_d, keep_w), n)
                - rank(F, _project(self.basis_B, D, keep_d, keep_w), n))

    def b_in_zo(self) -> bool:
        return in_span(self._pair.F, self.basis_Zo, self.basis_B, self.window[0] + self.window[1])

    def zo_in_z(self) -> bool:
        return in_span(self._pair.F, self.basis_Z, self.basis_Zo, self.window[0] + self.window[1])


def _project(vectors, D: int, keep_d: int, keep_w: int) -> list:
    return [tuple(v[:keep_d]) + tuple(v[D:D + keep_w]) for v in vectors]


def level_space(zeta: Series, mu: Series, D: int, r: int = 1, theta_min: int = 2) -> LevelSpace:
    """Z_r, Z_r^o and B_r for the pair (zeta, mu) in the window of degree D.

    The level r only labels the result: each M_r is one-dimensional over F_q,
    so the spaces are the same linear problem at every level.  ``theta_min``
    is the lowest degree allowed in theta; 1 adds the scalar conjugations
    (1 + c pi^r) x, whose image (-c zeta, c(x mu' - mu)) lies in Z^o but not
    in B when theta starts at x^2.
    """
    if r < 1:
        raise ValidationError("level must be >= 1")
    if theta_min not in (1, 2):
        raise ValidationError("theta_min must be 1 or 2")
    pair = _Pair(zeta, mu, D)
    F, Dw = pair.F, pair.Dw
    n = D + Dw
    cols = [pair.d_column(j) for j in range(1, D + 1)] + [pair.w_column(j) for j in range(1, Dw + 1)]
    rows = [[c[k] for c in cols] for k in range(1, D + 1)]
    basis_Z = nullspace(F, rows, n)
    pin = [[1 if i == 0 else 0 for i in range(n)], [1 if i == D else 0 for i in range(n)]]
    basis_Zo = nullspace(F, rows + pin, n)
    b_vecs = []
    for j in range(theta_min, Dw + 1):
        d, w = pair.theta_image(j)
        b_vecs.append(d[1:D + 1] + w[1:Dw + 1])
    basis_B = span_basis(F, b_vecs, n)
    S = Dw * pair.qs - pair.qs
    Sw = S // pair.qs
    ls = LevelSpace(r, zeta, mu, (D, Dw), tuple(basis_Z), tuple(basis_Zo), tuple(basis_B),
                    len(basis_Zo) - len(basis_B), (S, Sw), 0, pair)
    object.__setattr__(ls, "safe_quotient_dim", ls.projected_quotient_dim(S, Sw))
    return ls


def solve_theta(d: Series, zeta: Series) -> Series:
    """theta in x^2 F_q[[x]] with -theta(zeta) = d, to the truncation of d.

    The result is determined up to degree D // wideg(zeta).
    """
    if d.prec is not None or zeta.prec is not None:
        raise ValidationError("solve_theta works over F_q")
    F = _tables(zeta.base)
    D = min(d.trunc, zeta.trunc)
    qs, _ = _weierstrass_exponent(zeta)
    Dw = D // qs
    if Dw < 1:
        raise DegenerateWindow("window below the Weierstrass degree of zeta")
    z = _enc(F, zeta.truncate(D), D)
    pows = [None, z]
    for _ in range(2, Dw + 1):
        pows.append(_mulpoly(F, pows[-1], z, D))
    cols = [[F.neg[a] for a in pows[j]] for j in range(2, Dw + 1)]
    rows = [[c[k] for c in cols] for k in range(1, D + 1)]
    rhs = _enc(F, d.truncate(D), D)[1:]
    sol = solve(F, rows, rhs, len(cols)) if cols else ([] if not any(rhs) else None)
    if sol is None:
        raise NotInImage("d is not of the form -theta(zeta)")
    raw = [F.decode(0), F.decode(0)] + [F.decode(v) for v in sol]
    return Series(zeta.base, raw[:Dw + 1] + [F.decode(0)] * (Dw + 1 - len(raw)))


# ----------------------------------------------------------------------------
# the conjugator step

def congruence_level(a: Series, b: Series) -> int:
    """Largest k (capped at the known precision) with a = b mod pi^k coefficientwise."""
    diff = a.truncate(min(a.trunc, b.trunc)) - b.truncate(min(a.trunc, b.trunc))
    level = None
    for k in range(1, diff.trunc + 1):
        c = diff[k]
        v = c.valuation()
        v = c.known_prec if is_limit(v) else min(v, c.known_prec)
        level = v if level is None else min(level, v)
    return level


def _level_digits(a: Series, b: Series, r: int) -> Series:
    """((a - b) / pi^r) mod pi as a series over F_q."""
    diff = a - b
    fld = a.base.residue_field
    zero = fld.zero.v
    raw = [zero]
    for k in range(1, diff.trunc + 1):
        c = diff[k]
        if c.known_prec < r + 1:
            raise InsufficientPrecision(f"coefficient {k} known only mod pi^{c.known_prec}")
        v = c.valuation()
        if is_limit(v) or v >= c.known_prec:
            raw.append(zero)
            continue
        if v < r:
            raise HypothesisError(f"series differ at degree {k} below level {r}")
        raw.append(residue_reduce(pi_divide(c, r)).v)
    return Series(fld, raw)


@lru_cache(maxsize=32)
def _theta_system(zeta: Series, mu: Series, D: int):
    """Columns for theta_2..theta_D acting on (d, w) at degrees 1..D."""
    pair = _Pair(zeta, mu, D)
    F = pair.F
    cols = []
    for j in range(2, D + 1):
        d, w = pair.theta_image(j)
        cols.append(d[1:] + w[1:])
    rows = [[c[k] for c in cols] for k in range(2 * D)]
    return F, rows


def _solve_prefix(F, rows, rhs, D: int, m: int):
    """Solve with the d- and w-equations of degree <= m only."""
    idx = list(range(m)) + list(range(D, D + m))
    return solve(F, [rows[i] for i in idx], [rhs[i] for i in idx], D - 1)


def conjugator_step(f1: Series, u1: Series, f2: Series, u2: Series, r: int,
                    certify: int | None = None) -> Series:
    """phi = x (mod pi^r) with phi f1 = f2 phi and phi u1 = u2 phi mod pi^(r+1).

    By default every equation up to the truncation is imposed.  With
    ``certify`` set, equations are imposed up to the highest consistent
    degree, which must be at least ``certify``; the intertwinings then hold
    to that degree.
    """
    if r < 1:
        raise ValidationError("level must be >= 1")
    ring = f1.base
    if not isinstance(ring, RingSpec):
        raise ValidationError("conjugator_step works over O_K")
    D = min(f1.trunc, u1.trunc, f2.trunc, u2.trunc)
    f1, u1, f2, u2 = (s.truncate(D) for s in (f1, u1, f2, u2))
    d = _level_digits(f1, f2, r)
    w = _level_digits(u1, u2, r)
    zeta, mu = s_reduce(f2), s_reduce(u2)
    F, rows = _theta_system(zeta, mu, D)
    rhs = _enc(F, d, D)[1:] + _enc(F, w, D)[1:]
    sol = solve(F, rows, rhs, D - 1)
    if sol is None and certify is not None and certify < D:
        lo, hi = certify, D - 1
        sol = _solve_prefix(F, rows, rhs, D, lo)
        while sol is not None and lo < hi:
            mid = (lo + hi + 1) // 2
            trial = _solve_prefix(F, rows, rhs, D, mid)
            if trial is None:
                hi = mid - 1
            else:
                lo, sol = mid, trial
    if sol is None:
        raise NotInB(f"level-{r} difference is not in B_{r}", level=r)
    prec = min(s.min_prec() for s in (f1, u1, f2, u2))
    pi_r = ring.pi(prec) ** r
    coeffs = [ring.one(prec)] + [ring.lift(FqElem(F.field, F.decode(v)), prec) * pi_r for v in sol]
    return Series.from_coeffs(ring, coeffs, D, prec)


# ----------------------------------------------------------------------------
# congruence lemma and Case I

def _commute(a: Series, b: Series) -> bool:
    prec = min(a.min_prec(), b.min_prec())
    return congruence_level(s_compose(a, b), s_compose(b, a)) >= prec


def lemma_same_check(f: Series, u1: Series, u2: Series, alpha1, alpha2, beta,
                     F: FormalGroupLaw, r: int) -> bool:
    """f'(0) = beta and u2'(0) = alpha2 mod pi^(r+1), given the level-r congruences."""
    ring = F.ring
    alpha1, alpha2, beta = ring(alpha1), ring(alpha2), ring(beta)
    v1, v2, vb = (alpha1 - 1).valuation(), (alpha2 - 1).valuation(), beta.valuation()
    if is_limit(v1) or is_limit(vb) or not (0 < v1 < vb <= v2):
        raise HypothesisError(f"valuation chain 0 < {v1} < {vb} <= {v2} fails")
    D = min(f.trunc, u1.trunc, u2.trunc)
    f, u1, u2 = f.truncate(D), u1.truncate(D), u2.truncate(D)
    for a, b, names in ((f, u1, "f, u1"), (f, u2, "f, u2"), (u1, u2, "u1, u2")):
        if not _commute(a, b):
            raise HypothesisError(f"{names} do not commute to the truncation")
    prec = min(s.min_prec() for s in (f, u1, u2))
    for s, a, name in ((f, beta, "f"), (u1, alpha1, "u1"), (u2, alpha2, "u2")):
        if congruence_level(s, F.endo(a, D, prec)) < r:
            raise HypothesisError(f"{name} is not congruent to its endomorphism mod pi^{r}")
    return (((f[1] - beta).valuation() >= r + 1)
            and ((u2[1] - alpha2).valuation() >= r + 1))


def case1_reduce(g: Series, u: Series) -> Series:
    """h = g u^(-1) for v(g'(0)) = 1 and u lifting the factor gamma of g mod pi = gamma(x^q)."""
    ring = g.base
    if g[1].valuation() != 1:
        raise NotStable("case I needs v(g'(0)) = 1")
    if u[1].valuation() != 0:
        raise ValidationError("u must be invertible")
    D = min(g.trunc, u.trunc)
    g, u = g.truncate(D), u.truncate(D)
    gbar = s_reduce(g)
    try:
        gamma = frobenius_factor(gbar, 1)
    except NotFrobenius as exc:
        raise ReductionMismatch(str(exc)) from exc
    ubar = s_reduce(u).truncate(gamma.trunc)
    if not ubar == gamma:
        raise ReductionMismatch("u mod pi differs from the factor gamma of g mod pi")
    h = s_compose(g, s_comp_inverse(u))
    FrobeniusSeries.from_series(h)
    return h


# ----------------------------------------------------------------------------
# stabilizer oracles and rectify

class ConjugatedLubinTateOracle:
    """u_alpha = psi0 [alpha]_F psi0^(-1): the stabilizer of psi0 [beta]_F psi0^(-1)."""

    def __init__(self, F: FormalGroupLaw, psi0: Series | None = None):
        self.F = F
        self.psi0 = psi0

    def _conj(self, s: Series, deg: int, prec: int) -> Series:
        if self.psi0 is None:
            return s
        if self.psi0.trunc < deg:
            raise InsufficientPrecision("psi0 truncated below the requested degree")
        psi = self.psi0.truncate(deg)
        psi = _promote(psi, prec)
        return s_compose(psi, s_compose(s, s_comp_inverse(psi)))

    def __call__(self, alpha, deg: int, prec: int) -> Series:
        return self._conj(self.F.endo(self.F.ring(alpha), deg, prec), deg, prec)

    def conjugate(self, beta, deg: int, prec: int) -> Series:
        """The test series g = psi0 [beta]_F psi0^(-1)."""
        return self(beta, deg, prec)


def _promote(s: Series, prec: int) -> Series:
    """Treat the canonical coefficients of s as exact to pi^prec."""
    ring = s.base
    raw = [ring._canon(c, prec) for c in s._c]
    return Series(ring, raw, (prec,) * len(raw))


def primitive_root(fld: FiniteField):
    """The least generator of F_q^x in the encoding order."""
    F = _tables(fld)
    for n in range(1, F.q):
        a = FqElem(fld, F.decode(n))
        x, order = a, 1
        while not (x - 1).is_zero():
            x = x * a
            order += 1
        if order == F.q - 1:
            return a
    raise ValidationError("no primitive root found")


@dataclass(frozen=True)
class LevelRecord:
    level: int
    theta: tuple
    g_level: int
    u_level: int
    psi_step_level: int


@dataclass(frozen=True)
class RectifyResult:
    psi: Series
    beta: OKElem
    achieved_level: int
    case: str
    transcript: tuple
    window: int


def _query(oracle, alpha: OKElem, deg: int, prec: int) -> Series:
    u = oracle(alpha, deg, prec)
    if u.trunc < deg or u.min_prec() < prec:
        raise OraclePrecision(f"oracle returned precision {u.min_prec()} < {prec}")
    if ((u[1] - alpha).valuation() < prec):
        raise OraclePrecision("oracle series has the wrong linear coefficient")
    return u.truncate(deg)


def rectify(g: Series, oracle, F: FormalGroupLaw, n_target: int, deg: int | None = None) -> RectifyResult:
    """psi with psi g psi^(-1) = [g'(0)]_F mod pi^n_target to degree ``deg``.

    v(g'(0)) = 1 uses the Lubin-Tate isomorphism from g u^(-1) (any e);
    v(g'(0)) >= 2 runs the level-by-level conjugation and needs e = 1.
    The level loop solves each step in a window wider than ``deg`` (up to
    the truncation of g) because the top coefficients of every theta are
    unconstrained inside the window, and a wrong choice there surfaces a
    few degrees lower at the next level.
    """
    ring = F.ring
    if not ring.compatible(g.base):
        raise ValidationError("g and F live over different rings")
    D = g.trunc if deg is None else deg
    if D > g.trunc:
        raise InsufficientPrecision(f"g is truncated at {g.trunc} < {D}")
    if n_target < 1:
        raise ValidationError("target level must be >= 1")
    beta = g[1]
    s = beta.valuation()
    if is_limit(s) or s == 0 or s >= beta.known_prec:
        raise NotStable("g must be stable noninvertible")
    if s == 1:
        return _rectify_case1(g.truncate(D), oracle, F, n_target, D)
    if ring.e != 1:
        raise HypothesisError("the level-by-level construction needs an unramified ring")
    window = min(g.trunc, 2 * D)
    while True:
        try:
            return _rectify_case2(g.truncate(window), oracle, F, n_target, D, s)
        except NotInB as exc:
            if exc.level == 0 or window >= g.trunc:
                raise
            window = min(2 * window, g.trunc)


def _rectify_case1(g, oracle, F, n_target, D):
    ring = F.ring
    beta = g[1]
    P = n_target + D
    unit = pi_divide(beta.promote(P + 1), 1)
    u = _query(oracle, unit, D, P)
    h = case1_reduce(_promote(g, P) if g.min_prec() >= P else g, u)
    psi = lt_solve(ring.one(P), F.frob, FrobeniusSeries.from_series(h), D, n_target, method="generic")
    target = F.endo(beta, D, n_target)
    conj = s_compose(psi, s_compose(g, s_comp_inverse(psi)))
    level = congruence_level(conj, target)
    if level < n_target:
        raise OraclePrecision(f"case I reached only level {level}")
    rec = LevelRecord(0, (), congruence_level(g, target),
                      congruence_level(u, F.endo(unit, D, n_target)), level)
    return RectifyResult(psi, beta, level, "I", (rec,), D)


def _rectify_case2(g, oracle, F, n_target, D, s):
    """Level loop in the window g.trunc; congruences are reported to degree D."""
    ring = F.ring
    W = g.trunc
    P = n_target + 1
    if g.min_prec() < P:
        raise InsufficientPrecision(f"g known only mod pi^{g.min_prec()}")
    beta = g[1]
    alpha2 = ring.one(P) + ring(ring.p, P) ** s
    omega = teichmuller(primitive_root(ring.residue_field), ring, P)
    u = s_compose(_query(oracle, alpha2, W, P), _query(oracle, omega, W, P))
    fb = F.endo(beta, W, P)
    fu = F.endo(omega * alpha2, W, P)
    if not (s_reduce(g) == s_reduce(fb) and s_reduce(u) == s_reduce(fu)):
        raise NotInB("reductions of (g, u) differ from ([beta], [omega alpha2])", level=0)

    def level(a, b):
        return congruence_level(a.truncate(D), b.truncate(D))

    x = Series.x(ring, W, P)
    psi = x
    records = []
    for r in range(1, n_target):
        if psi is x:
            gr, ur = g, u
        else:
            inv = s_comp_inverse(psi)
            gr = s_compose(psi, s_compose(g, inv))
            ur = s_compose(psi, s_compose(u, inv))
        if min(congruence_level(gr, fb), congruence_level(ur, fu)) >= r + 1:
            phi = x
        else:
            phi = conjugator_step(gr, ur, fb, fu, r, certify=D)
        theta = tuple(residue_reduce(pi_divide(phi[k], r)).v if not phi[k].is_zero() else
                      (0,) * ring.f for k in range(2, D + 1))
        new_psi = s_compose(phi, psi)
        records.append(LevelRecord(r, theta, level(gr, fb), level(ur, fu), level(new_psi, psi)))
        psi = new_psi
    psi = psi.truncate(D)
    conj = s_compose(psi, s_compose(g.truncate(D), s_comp_inverse(psi)))
    reached = min(congruence_level(conj, fb.truncate(D)), n_target)
    if reached < n_target:
        raise ResidualError(f"rectify reached only level {reached}")
    return RectifyResult(psi, beta, reached, "II", tuple(records), W)
