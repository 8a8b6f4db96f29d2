"""Exception hierarchy for the solver library and benchmark harness."""


class PgelsError(Exception):
    """Base class for every error raised by this package."""


class DataError(PgelsError, ValueError):
    """Problem data violates a modelling assumption (labels, empty matrices, zero columns)."""


class InvariantViolation(PgelsError, AssertionError):
    """A convergence-theory invariant failed at runtime."""


class DegenerateBenchmarkError(PgelsError, ValueError):
    """Every algorithm started at the best objective value, so e(k) is undefined."""
