"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Raised when an operation receives parameters outside its domain."""


class DegenerateStateError(ValueError):
    """Raised when a sampler state carries an exactly-zero scale component."""


class NumericalError(RuntimeError):
    """Raised when a numerical routine cannot meet its accuracy contract."""
