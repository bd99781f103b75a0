"""Exception types raised across the package."""


class PosiplantError(Exception):
    """Base class for all package errors."""


class DimensionError(PosiplantError, ValueError):
    """A bitstring or operand does not match the instance size."""


class SizeCapError(PosiplantError, ValueError):
    """An exhaustive routine was asked to enumerate more than its cap."""


class ContractError(PosiplantError, ValueError):
    """A documented precondition was violated by the caller."""


class ConfigurationError(PosiplantError, ValueError):
    """A generator configuration cannot produce a valid instance."""


class SparseGraphError(PosiplantError, RuntimeError):
    """Planting hit its clause cap before the planted bitstring became unique."""
