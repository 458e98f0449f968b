"""Exception types shared across the package.

Validation failures raise ValueError subclasses so generic callers can catch
them uniformly; resource-cap and accuracy failures are RuntimeErrors because
the inputs were legal but the computation refused to proceed.
"""


class InvalidDegreeError(ValueError):
    """An interaction degree outside {2, ..., P} or a malformed mixture."""


class DomainError(ValueError):
    """A scalar argument outside the documented domain of an operation."""


class ShapeMismatchError(ValueError):
    """Two disorder objects with incompatible (N, degrees) layouts."""


class ResourceCapError(RuntimeError):
    """A requested allocation exceeds the configured cap.

    Carries the offending size so callers can report it.
    """

    def __init__(self, message: str, size: int) -> None:
        super().__init__(message)
        self.size = size


class AccuracyError(RuntimeError):
    """A quadrature or solver failed to reach its tolerance.

    Carries the residual achieved.
    """

    def __init__(self, message: str, residual: float) -> None:
        super().__init__(message)
        self.residual = residual
