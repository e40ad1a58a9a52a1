"""Exception types shared across the package."""


class DomainError(ValueError):
    """Evaluation requested outside the series' half-plane (or range)."""


class RangeError(OverflowError):
    """A computed quantity left the representable floating range."""


class NoSaddleError(RuntimeError):
    """The saddle equation has no root in the searchable bracket (x too small)."""


class ConvergenceError(RuntimeError):
    """An iterative scheme failed to reach its tolerance; carries diagnostics."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
