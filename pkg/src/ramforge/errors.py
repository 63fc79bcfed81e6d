"""Exception hierarchy and precision sentinels shared by every module.

Each exception carries a short ``code`` naming the failure and an
``exit_code`` used by the command-line front end:

    2  validation / malformed input
    3  precision or truncation too small
    4  a mathematical hypothesis does not hold
    5  internal residual failure (a bug, never user error)
"""

from __future__ import annotations


class RamforgeError(Exception):
    code = "ERROR"
    exit_code = 1

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.code)
        self.details = details


class ValidationError(RamforgeError):
    code = "VALIDATION"
    exit_code = 2


class PrecisionError(RamforgeError):
    code = "PRECISION"
    exit_code = 3


class HypothesisError(RamforgeError):
    code = "HYPOTHESIS_VIOLATED"
    exit_code = 4


class ResidualError(RamforgeError):
    code = "RESIDUAL_NONZERO"
    exit_code = 5


# validation
class RingMismatch(ValidationError):
    code = "RING_MISMATCH"


class SchemaError(ValidationError):
    code = "SCHEMA"


class BudgetExceeded(ValidationError):
    code = "BUDGET_EXCEEDED"


class DegenerateWindow(ValidationError):
    code = "DEGENERATE_WINDOW"


class TooFewEntries(ValidationError):
    code = "TOO_FEW_ENTRIES"


class ZeroInput(ValidationError):
    code = "ZERO_INPUT"


# precision
class InsufficientPrecision(PrecisionError):
    code = "INSUFFICIENT_PRECISION"


class PrecisionExhausted(PrecisionError):
    code = "PRECISION_EXHAUSTED"


class OraclePrecision(PrecisionError):
    code = "ORACLE_PRECISION"


# mathematical hypotheses
class NotAUnit(HypothesisError):
    code = "NOT_A_UNIT"


class NotDivisible(HypothesisError):
    code = "NOT_DIVISIBLE"


class NotInvertible(HypothesisError):
    code = "NOT_INVERTIBLE"


class NotStable(HypothesisError):
    code = "NOT_STABLE"


class NotPPower(HypothesisError):
    code = "NOT_P_POWER"


class NoncommutingGenerators(HypothesisError):
    code = "NONCOMMUTING_GENERATORS"


class NoncommutingPair(HypothesisError):
    code = "NONCOMMUTING_PAIR"


class NotInImage(HypothesisError):
    code = "NOT_IN_IMAGE"


class NotInB(HypothesisError):
    code = "NOT_IN_B"

    def __init__(self, message: str = "", level: int | None = None, **details):
        super().__init__(message, level=level, **details)
        self.level = level


class NoMatchingM(HypothesisError):
    code = "NO_MATCHING_M"


class ReductionMismatch(HypothesisError):
    code = "REDUCTION_MISMATCH"


class NotFrobenius(HypothesisError):
    code = "NOT_FROBENIUS"


# internal
class NeitherMatches(ResidualError):
    code = "NEITHER_MATCHES"


class NotIntegral(ResidualError):
    code = "NOT_INTEGRAL"


class PrecisionLimit(float):
    """An "unknown beyond truncation" marker.

    Behaves as +inf in comparisons so it sorts after every finite value,
    but keeps its own name so callers can tell *which* limit was hit.
    Compare with ``is``.
    """

    def __new__(cls, name: str):
        obj = super().__new__(cls, float("inf"))
        obj.name = name
        return obj

    def __repr__(self) -> str:
        return self.name

    __str__ = __repr__

    def __reduce__(self):
        return (_limit_by_name, (self.name,))


INFINITE_AT_PRECISION = PrecisionLimit("INFINITE_AT_PRECISION")
IDENTITY_AT_PRECISION = PrecisionLimit("IDENTITY_AT_PRECISION")


def _limit_by_name(name: str) -> PrecisionLimit:
    return {"INFINITE_AT_PRECISION": INFINITE_AT_PRECISION,
            "IDENTITY_AT_PRECISION": IDENTITY_AT_PRECISION}[name]


def is_limit(value) -> bool:
    return isinstance(value, PrecisionLimit)
