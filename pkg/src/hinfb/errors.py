"""Exception types shared across the package.

The CLI maps these onto exit codes, so every module raises one of these
instead of bare ``ValueError``/``RuntimeError`` for domain failures.
"""


class HinfbError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(HinfbError, ValueError):
    """An argument violates a documented precondition (|a| >= 1, non-unit v, ...)."""


class AmbiguousMatchError(HinfbError, ValueError):
    """Two points are closer than the matching tolerance but not identical."""


class NearDependentBasisError(HinfbError, ValueError):
    """A Grammian is numerically singular (labels or nodes too close)."""


class UnsupportedCaseError(HinfbError, ValueError):
    """The requested computation is not defined for this configuration (e.g. r = 0)."""


class InfeasibleByStructureError(HinfbError):
    """Targets contradict a forced equality (kernel dependence), so no interpolant exists."""


class SeparationError(HinfbError):
    """No separating function was found, or its separation is too small to use."""


class RankToleranceError(HinfbError):
    """A rank decision could not be made stably at the configured threshold."""


class InternalAssertionError(HinfbError, AssertionError):
    """A cross-check between two independent routes failed."""


class SeparationWarning(UserWarning):
    """A separating function exists but its node values are nearly coincident."""


class ConditioningWarning(UserWarning):
    """Inputs sit close to a regime where numerics degrade."""
