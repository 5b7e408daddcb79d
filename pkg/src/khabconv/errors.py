"""Exception hierarchy shared by all modules."""


class KhabError(Exception):
    """Base class for errors raised by khabconv."""


class DomainError(KhabError, ValueError):
    """An argument lies outside the domain of the operation."""


class OutOfRangeError(DomainError):
    """Evaluation point outside the range of a sampled function (no extrapolation)."""


class ConfigurationError(KhabError, ValueError):
    """Invalid or degenerate numerical configuration."""


class EvaluationError(KhabError, ArithmeticError):
    """A user-supplied function returned NaN or could not be evaluated."""


class ConditioningError(KhabError, ArithmeticError):
    """Numerical differentiation is too ill-conditioned to give a usable answer."""


class GridTransformError(KhabError, RuntimeError):
    """Too many points of a grid evaluation failed."""
