"""Exception hierarchy shared by all modules."""


class MillsError(Exception):
    """Base class for errors raised by this package."""


class DomainError(MillsError, ValueError):
    """Argument outside the domain where the operation is defined."""


class IntegralityViolation(MillsError, ArithmeticError):
    """A quantity that must be an integer came out fractional (a bug, not bad input)."""


class MissingDependency(MillsError, LookupError):
    """A table entry was requested before the rows it depends on were filled."""


class PrecisionUnachievable(MillsError, ArithmeticError):
    """The requested accuracy needs more work than the iteration ceiling allows."""


class NonConvergence(MillsError, ArithmeticError):
    """A truncated series failed to settle below its target."""


class InstanceTooLarge(MillsError, ValueError):
    """Brute-force enumeration refused because the instance exceeds the guard."""
