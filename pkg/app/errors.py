"""Exception types raised by the toolkit."""


class CombWalkError(Exception):
    """Base class for toolkit errors."""


class InvalidDimensionError(CombWalkError, ValueError):
    """Lattice dimension is not a positive integer, or dimensions disagree."""


class SparseTrajectoryError(CombWalkError, ValueError):
    """Operation needs a full step record but only checkpoints were kept."""


class DistanceOverflowError(CombWalkError):
    """Breadth-first search exceeded its radius cap."""


class BudgetGuardError(CombWalkError):
    """A computation was asked to exceed its resource guard."""


class CriterionDegenerateError(CombWalkError, ValueError):
    """Series criterion has a nonpositive exponent."""


class StatTestError(CombWalkError, ValueError):
    """Statistical test input is empty or has degenerate bins."""


class ConfigError(CombWalkError):
    """Experiment config is missing, malformed or violates constraints."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
