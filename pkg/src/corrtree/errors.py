"""Exception types shared across the package."""


class DataValidationError(ValueError):
    """Raised when input data violates a documented contract.

    Carries a message that names the offending symbol, row, or label so
    callers (CLI, service) can surface a one-line diagnostic.
    """
