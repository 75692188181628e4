"""Exception types shared across the package."""


class BallisticError(Exception):
    """Base class for all package-specific errors."""


class DomainError(BallisticError, ValueError):
    """Argument outside the mathematical domain of the operation."""


class SingularityError(BallisticError, ValueError):
    """Evaluation requested at (or too close to) a source singularity."""


class RegimeError(BallisticError, ValueError):
    """Asymptotic formula requested outside its regime of validity."""


class StabilityError(BallisticError, ArithmeticError):
    """Recursion or evaluation scheme has lost too many digits to trust."""


class UnsupportedOrderError(BallisticError, ValueError):
    """Index or derivative order beyond the supported range."""


class StabilityWarning(UserWarning):
    """Result returned, but digits were likely lost near a singular limit."""
