"""Exception types shared across the package."""


class DickePrepError(Exception):
    """Base class for all package errors."""


class InvalidArgs(DickePrepError, ValueError):
    pass


class DimensionCap(DickePrepError):
    """Raised when a sector would exceed the configured dimension cap."""


class NotInSector(DickePrepError, ValueError):
    pass


class BasisMismatch(DickePrepError, ValueError):
    pass


class IntegrationFailure(DickePrepError, RuntimeError):
    """Step control could not meet the requested tolerance."""
