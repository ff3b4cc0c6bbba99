"""Exception hierarchy shared across the package."""


class VnlwError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(VnlwError):
    """A requested computation exceeds configured resource limits."""


class AccuracyError(VnlwError):
    """A quadrature tolerance could not be reached.

    Carries the best error estimate achieved so the caller can decide
    whether the result is still usable.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class RegimeError(VnlwError):
    """Inputs fall outside the parameter regime an operation is valid for."""


class DivergenceError(VnlwError):
    """A series or fixed-point iteration failed to converge.

    ``history`` holds the per-level (or per-iteration) norms observed
    before the diagnosis.
    """

    def __init__(self, message: str, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []
