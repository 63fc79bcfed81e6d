"""Hasse-Herbrand functions as exact rational piecewise-linear maps."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import TooFewEntries, ValidationError
from .nottingham import FiniteFiltration


@dataclass(frozen=True)
class PiecewiseLinear:
    """f(0) = 0; slope ``slopes[i]`` on [breakpoints[i], breakpoints[i+1]).

    ``breakpoints[0]`` is 0 and the last slope continues to infinity; negative
    arguments use the first slope.
    """

    breakpoints: tuple
    slopes: tuple

    def __post_init__(self):
        bps = tuple(Fraction(b) for b in self.breakpoints)
        sls = tuple(Fraction(s) for s in self.slopes)
        if not bps or bps[0] != 0:
            raise ValidationError("first breakpoint must be 0")
        if len(bps) != len(sls):
            raise ValidationError("need one slope per breakpoint")
        if any(b <= a for a, b in zip(bps, bps[1:])):
            raise ValidationError("breakpoints must be strictly increasing")
        if any(s <= 0 for s in sls):
            raise ValidationError("slopes must be positive")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slopes", sls)

    @classmethod
    def identity(cls) -> "PiecewiseLinear":
        return cls((0,), (1,))

    def values_at_breaks(self) -> tuple:
        vals = [Fraction(0)]
        for i in range(1, len(self.breakpoints)):
            width = self.breakpoints[i] - self.breakpoints[i - 1]
            vals.append(vals[-1] + width * self.slopes[i - 1])
        return tuple(vals)

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        if x < 0:
            return x * self.slopes[0]
        vals = self.values_at_breaks()
        k = len(self.breakpoints) - 1
        while self.breakpoints[k] > x:
            k -= 1
        return vals[k] + (x - self.breakpoints[k]) * self.slopes[k]

    def simplified(self) -> "PiecewiseLinear":
        """Merge adjacent pieces of equal slope."""
        bps, sls = [self.breakpoints[0]], [self.slopes[0]]
        for b, s in zip(self.breakpoints[1:], self.slopes[1:]):
            if s != sls[-1]:
                bps.append(b)
                sls.append(s)
        return PiecewiseLinear(tuple(bps), tuple(sls))


def pl_inverse(f: PiecewiseLinear) -> PiecewiseLinear:
    """Exact functional inverse."""
    return PiecewiseLinear(f.values_at_breaks(), tuple(1 / s for s in f.slopes))


def phi_from_filtration(filt: FiniteFiltration) -> PiecewiseLinear:
    """phi(s) = integral_0^s dt / (G : G[t])."""
    bps, sls = [Fraction(0)], [Fraction(1, filt.indices[0])]
    for k, b in enumerate(filt.breaks):
        b = Fraction(b)
        slope = Fraction(1, filt.indices[k + 1])
        if b <= 0:
            sls[-1] = slope
            continue
        bps.append(b)
        sls.append(slope)
    return PiecewiseLinear(tuple(bps), tuple(sls)).simplified()


def psi_from_filtration(filt: FiniteFiltration) -> PiecewiseLinear:
    return pl_inverse(phi_from_filtration(filt))


def upper_breaks(filt: FiniteFiltration) -> list:
    phi = phi_from_filtration(filt)
    return [phi(b) for b in filt.breaks]


def synthetic_filtration(q: int, r: int, levels: int) -> FiniteFiltration:
    """Breaks q^l - 1 for l = r .. r+levels-1 with (G : G[t]) = q^(l-r) below each."""
    if levels < 1:
        raise ValidationError("need at least one level")
    breaks = tuple(q ** l - 1 for l in range(r, r + levels))
    indices = tuple(q ** k for k in range(levels + 1))
    return FiniteFiltration(levels, breaks, indices, q ** levels)


def herbrand_gap(q: int, r: int, e: int, ell: int) -> Fraction:
    """phi(q^(l+e) - 1) - phi(q^l - 1) on the synthetic filtration."""
    if ell < r:
        raise ValidationError("l must be >= r")
    filt = synthetic_filtration(q, r, ell + e - r + 1)
    phi = phi_from_filtration(filt)
    return phi(q ** (ell + e) - 1) - phi(q ** ell - 1)


def criterion_window(filts: list) -> dict:
    """Min and max of x / (G : G[x]) sampled at every break of every level."""
    if not filts:
        raise TooFewEntries("need at least one filtration")
    ratios = []
    for filt in filts:
        for k, b in enumerate(filt.breaks):
            ratios.append(Fraction(b) / filt.indices[k])
    if not ratios:
        raise TooFewEntries("filtrations have no breaks")
    return {"min_ratio": min(ratios), "max_ratio": max(ratios), "samples": tuple(ratios)}
