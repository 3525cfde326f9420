"""Exception hierarchy shared across the package."""


class SubordinationError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SubordinationError, ValueError):
    """A problem specification violates the admissible parameter set."""

    constraint = "invalid"


class OrderOutOfRange(ValidationError):
    constraint = "order_out_of_range"


class NonPositiveCoefficient(ValidationError):
    constraint = "non_positive_coefficient"


class OrdersNotDecreasing(ValidationError):
    constraint = "orders_not_decreasing"


class SpreadTooLarge(ValidationError):
    constraint = "spread_too_large"


class DomainError(SubordinationError, ValueError):
    """Argument lies outside the domain of the function (e.g. on a branch cut)."""


class NotWaveLimit(DomainError):
    pass


class NotApplicable(DomainError):
    pass


class ConvergenceError(SubordinationError, ArithmeticError):
    """Numerical procedure did not reach the requested accuracy."""


class NoConvergence(ConvergenceError):
    pass


class BadSingularity(ConvergenceError):
    pass


class PrecisionLoss(ConvergenceError):
    pass


class GridTooCoarse(ConvergenceError):
    pass


class DegenerateIdentity(SubordinationError):
    """The requested density does not exist; the kernel is a point mass.

    ``location`` holds the position of the unit mass.
    """

    def __init__(self, message, location):
        super().__init__(message)
        self.location = location
