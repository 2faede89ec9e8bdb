"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class NumericError(RuntimeError):
    """Raised when a numerical routine fails to converge."""


class ResourceError(MemoryError):
    """Raised when a requested dense object exceeds the memory budget."""
