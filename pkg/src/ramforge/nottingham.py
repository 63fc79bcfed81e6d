"""Wild automorphisms x + x^2 F_q[[x]] and their ramification numbers."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import (
    IDENTITY_AT_PRECISION,
    INFINITE_AT_PRECISION,
    BudgetExceeded,
    NoncommutingGenerators,
    ValidationError,
    is_limit,
)
from .ring import FiniteField
from .series import Series, s_comp_inverse, s_compose, s_iterate

DEFAULT_BUDGET = 10 ** 4


class NottElem:
    """sigma(x) = x + (higher terms) over a finite field."""

    __slots__ = ("series",)

    def __init__(self, series: Series):
        if not isinstance(series.base, FiniteField):
            raise ValidationError("Nottingham elements live over a finite field")
        if series.trunc < 1 or series._c[1] != series.base.one.v:
            raise ValidationError("linear coefficient must be 1")
        self.series = series

    @classmethod
    def from_coeffs(cls, field: FiniteField, coeffs, trunc: int | None = None):
        return cls(Series.from_coeffs(field, coeffs, trunc))

    @classmethod
    def identity(cls, field: FiniteField, trunc: int):
        return cls(Series.x(field, trunc))

    @property
    def field(self) -> FiniteField:
        return self.series.base

    @property
    def trunc(self) -> int:
        return self.series.trunc

    def __matmul__(self, other: "NottElem") -> "NottElem":
        """Composition self(other(x))."""
        return NottElem(s_compose(self.series, other.series))

    def inverse(self) -> "NottElem":
        return NottElem(s_comp_inverse(self.series))

    def __pow__(self, n: int) -> "NottElem":
        if n < 0:
            return self.inverse() ** (-n)
        return NottElem(s_iterate(self.series, n))

    def is_identity(self) -> bool:
        return self.series == Series.x(self.field, self.trunc)

    def __eq__(self, other):
        return isinstance(other, NottElem) and self.series == other.series

    def __hash__(self):
        return hash(self.series)

    def __repr__(self):
        return f"NottElem({self.series!r})"


def ram_number(sigma: NottElem):
    """ord_x(sigma(x) - x) - 1, or IDENTITY_AT_PRECISION."""
    c = sigma.series._c
    for k in range(2, len(c)):
        if any(c[k]):
            return k - 1
    return IDENTITY_AT_PRECISION


@dataclass(frozen=True)
class RamProfile:
    element: NottElem
    values: tuple
    trunc: int

    @property
    def p(self) -> int:
        return self.element.field.p

    def finite_prefix(self) -> tuple:
        out = []
        for v in self.values:
            if is_limit(v):
                break
            out.append(v)
        return tuple(out)

    @property
    def complete(self) -> bool:
        return not any(is_limit(v) for v in self.values)


def _classify(values):
    """Identity for sigma itself means identity throughout; later identities are precision limits."""
    if values and values[0] is IDENTITY_AT_PRECISION:
        return tuple(IDENTITY_AT_PRECISION for _ in values)
    return tuple(INFINITE_AT_PRECISION if v is IDENTITY_AT_PRECISION else v for v in values)


def ram_sequence(sigma: NottElem, n_max: int) -> RamProfile:
    """i_n(sigma) = i(sigma^(p^n)) for n = 0..n_max via p-th power iterates.

    A nonidentity sigma whose p^n-th iterate is x at the truncation gets
    INFINITE_AT_PRECISION (i_n exceeds what the truncation can show).
    """
    if n_max < 0:
        raise ValidationError("n_max must be >= 0")
    p = sigma.field.p
    values = []
    tau = sigma.series
    for n in range(n_max + 1):
        if n:
            tau = s_iterate(tau, p)
        v = ram_number(NottElem(tau))
        values.append(v)
        if v is IDENTITY_AT_PRECISION:
            values.extend([IDENTITY_AT_PRECISION] * (n_max - n))
            break
    return RamProfile(sigma, _classify(values), sigma.trunc)


def profile_from_iterates(iterates: list, element: NottElem | None = None) -> RamProfile:
    """Profile from precomputed sigma^(p^n), n = 0, 1, ... (e.g. endomorphism reductions)."""
    values = [ram_number(t) for t in iterates]
    element = iterates[0] if element is None else element
    return RamProfile(element, _classify(values), min(t.trunc for t in iterates))


# ----------------------------------------------------------------------------
# finite quotient filtrations

@dataclass(frozen=True)
class FiniteFiltration:
    """Lower-numbering filtration of a finite quotient G / G^(p^n).

    ``indices[0]`` is 1 (t <= breaks[0]); ``indices[k]`` is (G : G[t]) for
    breaks[k-1] < t <= breaks[k], and ``indices[-1]`` applies past the last
    break.  ``members`` lists (exponent vector, i) for every nonidentity
    representative, in lexicographic order of exponents.
    """

    level: int
    breaks: tuple
    indices: tuple
    order: int = 1
    members: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if len(self.indices) != len(self.breaks) + 1:
            raise ValidationError("indices must have one more entry than breaks")
        if any(b >= a for a, b in zip(self.breaks[1:], self.breaks)):
            raise ValidationError("breaks must be strictly increasing")
        if any(i <= 0 for i in self.indices):
            raise ValidationError("indices must be positive")

    def index_at(self, t) -> int:
        """(G : G[t])."""
        for k, b in enumerate(self.breaks):
            if t <= b:
                return self.indices[k]
        return self.indices[-1]

    def subgroup(self, t) -> set:
        """Exponent vectors of G[t] (identity included)."""
        size = len(self.members[0][0]) if self.members else 0
        out = {(0,) * size}
        out.update(exps for exps, i in self.members if i >= t)
        return out

    @property
    def max_break(self):
        return self.breaks[-1] if self.breaks else None


def filtration_from_values(values: list, level: int, order: int, members=()) -> FiniteFiltration:
    """Filtration of a group of ``order`` elements whose nonidentity i-values are ``values``."""
    breaks = tuple(sorted(set(values)))
    indices = [1]
    for b in breaks:
        survivors = 1 + sum(1 for v in values if v > b)
        if order % survivors:
            raise ValidationError("subgroup sizes must divide the group order")
        indices.append(order // survivors)
    return FiniteFiltration(level, breaks, tuple(indices), order, tuple(members))


def check_commuting(gens: list) -> None:
    for a, b in itertools.combinations(gens, 2):
        if not (a @ b) == (b @ a):
            raise NoncommutingGenerators("generators do not commute at the truncation")


def finite_quotient_filtration(gens: list, n: int, budget: int = DEFAULT_BUDGET) -> FiniteFiltration:
    """Brute-force filtration of <gens> / <gens>^(p^n) from coset representatives."""
    if n < 0:
        raise ValidationError("level must be >= 0")
    if not gens:
        return FiniteFiltration(n, (), (1,), 1)
    field_ = gens[0].field
    p = field_.p
    size = p ** n
    total = size ** len(gens)
    if total > budget:
        raise BudgetExceeded(f"{total} cosets exceed the budget {budget}")
    trunc = min(g.trunc for g in gens)
    gens = [NottElem(g.series.truncate(trunc)) for g in gens]
    check_commuting(gens)
    powers = []
    for g in gens:
        row = [NottElem.identity(field_, trunc)]
        for _ in range(1, size):
            row.append(g @ row[-1])
        powers.append(row)
    members = []
    values = []
    for exps in itertools.product(range(size), repeat=len(gens)):
        if not any(exps):
            continue
        elem = None
        for j, a in enumerate(exps):
            if a:
                elem = powers[j][a] if elem is None else elem @ powers[j][a]
        i = ram_number(elem)
        if i is IDENTITY_AT_PRECISION:
            i = INFINITE_AT_PRECISION
        members.append((exps, i))
        values.append(i)
    return filtration_from_values(values, n, total, members)
