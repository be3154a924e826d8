"""
Integral-test classification of the lower-class series sum_n a(2^n)^p.

Families:
- power:    a(t) = t^-alpha, converges iff alpha * p > 0
- logpower: a(t) = (log2 t)^-beta, converges iff beta * p > 1
- custom:   any nonincreasing a(t); reported inconclusive
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Literal

import numpy as np

from app.errors import CriterionDegenerateError

Classification = Literal["convergent", "divergent", "inconclusive"]

# Dyadic exponents used to sanity-check a(t)
CHECK_GRID = np.arange(1, 65, dtype=np.float64)


class SeriesFamily(str, Enum):
    POWER = "power"
    LOGPOWER = "logpower"
    CUSTOM = "custom"


class ExponentKind(str, Enum):
    ZD_LOWER = "zd_lower"  # K walkers on Z^d: p = K d - d - 2
    COMB_LOWER = "comb_lower"  # K walkers on the comb: p = K - 2
    SINGLE_WALKER = "single_walker"  # one walker on Z^d: p = d - 2


def criterion_exponent(kind: ExponentKind | str, K: int = 1, d: int = 1) -> int:
    """Exponent p of a(2^n)^p for the given kind of lower-class statement."""
    kind = ExponentKind(kind)
    if kind is ExponentKind.ZD_LOWER:
        return K * d - d - 2
    if kind is ExponentKind.COMB_LOWER:
        return K - 2
    return d - 2


@dataclass(frozen=True)
class SeriesCriterion:
    family: SeriesFamily
    parameter: float
    exponent: int
    func: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", SeriesFamily(self.family))
        if self.family is not SeriesFamily.CUSTOM and self.parameter < 0:
            raise ValueError(f"family parameter must be >= 0, got {self.parameter}")

    def a_on_dyadics(self, log2_t: np.ndarray) -> np.ndarray:
        """a(2^m) for exponents m."""
        if self.family is SeriesFamily.POWER:
            return np.exp2(-self.parameter * log2_t)
        if self.family is SeriesFamily.LOGPOWER:
            return log2_t ** (-self.parameter)
        if self.func is None:
            raise ValueError("custom family needs a function")
        return np.asarray(self.func(np.exp2(log2_t)), dtype=np.float64)


def series_classify(criterion: SeriesCriterion) -> Classification:
    """
    Classify sum_n a(2^n)^p.

    Raises:
        CriterionDegenerateError: If p <= 0 (the test says nothing)
        ValueError: If a is negative or increasing on the dyadic grid
    """
    family = SeriesFamily(criterion.family)
    p = criterion.exponent
    if p <= 0:
        raise CriterionDegenerateError(f"exponent p={p} <= 0; the series test does not apply")

    values = criterion.a_on_dyadics(CHECK_GRID)
    if np.any(values < 0) or np.any(np.diff(values) > 0):
        raise ValueError("a(t) must be nonnegative and nonincreasing")

    if family is SeriesFamily.POWER:
        return "convergent" if criterion.parameter * p > 0 else "divergent"
    if family is SeriesFamily.LOGPOWER:
        return "convergent" if criterion.parameter * p > 1 else "divergent"
    return "inconclusive"
