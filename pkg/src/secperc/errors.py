class ValidationError(ValueError):
    """Raised when an input violates a documented invariant (bad probability
    vector, out-of-range parameter, malformed graph, ...)."""
