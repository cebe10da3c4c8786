"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """Raised when an input violates a documented precondition."""


class DegeneratePlaneError(InvalidArgument):
    """Raised when two vectors do not span a 2-plane."""


class UndefinedRatioError(InvalidArgument):
    """Raised when a ratio has a vanishing denominator."""
