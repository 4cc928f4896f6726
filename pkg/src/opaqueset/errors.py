"""Exception types raised across the package."""


class OpaqueSetError(Exception):
    """Base class for all package errors."""


class ValidationError(OpaqueSetError, ValueError):
    """Invalid geometric input (degenerate polygon, zero-length segment, NaN)."""


class ParameterError(OpaqueSetError, ValueError):
    """An argument is outside its documented range."""


class InconsistentSceneError(OpaqueSetError):
    """The scene contradicts a hypothesis of the check being run.

    Raised for example when a bound that assumes opacity is evaluated on a
    configuration shorter than half the perimeter.
    """


class DomainMismatchError(OpaqueSetError):
    """A check specific to one domain was invoked on another."""


class PreconditionError(OpaqueSetError):
    """An operation was called on input that does not meet its precondition."""


class SceneFormatError(OpaqueSetError, ValueError):
    """A scene document could not be parsed; the message names the field."""
