"""Error types shared across the package."""


class BudgetExceededError(Exception):
    """Raised when an exhaustive computation would exceed its configured budget."""

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class KernelSizeError(Exception):
    """Raised when a dense kernel would exceed the configured face cap."""


class NumericalDegeneracyError(Exception):
    """Raised when the float-mode sampler selects a pivot below tolerance."""
