"""Exception types raised across the package."""


class FidError(Exception):
    """Base class for all package errors."""


class DimensionError(FidError, ValueError):
    """Shapes of the inputs do not agree."""


class FormatError(FidError, ValueError):
    """A stats file or sample CSV is malformed."""


class NumericalError(FidError, ArithmeticError):
    """A computation produced non-finite values or failed to converge."""
