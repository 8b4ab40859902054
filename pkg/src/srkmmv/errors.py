"""Exception hierarchy shared by all srkmmv modules."""


class KaczmarzError(Exception):
    """Base class for all srkmmv errors."""


class DimensionError(KaczmarzError):
    """Operands have incompatible shapes."""


class SingularMatrixError(KaczmarzError):
    """Normal equations are numerically singular."""


class DegenerateDistributionError(KaczmarzError):
    """Row-selection distribution has no probability mass (all-zero matrix)."""


class InvalidSparsityError(KaczmarzError):
    """Requested support size is outside [1, n]."""


class ZeroRowError(KaczmarzError):
    """Projection onto a hyperplane with a zero normal vector."""


class UnsupportedVariantError(KaczmarzError):
    """Solver variant cannot handle the given problem shape."""


class DegenerateMetricError(KaczmarzError):
    """Metric is undefined for the given input (zero reference, empty list)."""


class SpecValidationError(KaczmarzError):
    """Experiment specification is malformed or inconsistent."""
