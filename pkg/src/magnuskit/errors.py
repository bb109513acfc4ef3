"""Shared exception types."""


class BeyondCapError(RuntimeError):
    """A query left the configured exact-computation range (BFS radius,
    search window, or node budget).  Retry with a wider cap if the range
    genuinely matters."""


class InvariantViolation(AssertionError):
    """A machine-checked identity the library guarantees failed to hold."""
