"""Exception hierarchy shared by all modules."""


class FreewaveError(Exception):
    """Base class for library errors."""


class InvalidArgument(FreewaveError, ValueError):
    pass


class InvalidProfile(InvalidArgument):
    """Surface profile is not representable (odd n, non-finite, or below the bottom)."""


class SolverDivergence(FreewaveError, RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class CompatibilityViolation(InvalidArgument):
    """Neumann data carries a net flux through the boundary."""

    def __init__(self, message, flux):
        super().__init__(message)
        self.flux = flux


class DegenerateQuotient(FreewaveError, ZeroDivisionError):
    pass


class MaxIterExceeded(FreewaveError, RuntimeError):
    """Iteration budget exhausted; ``best`` holds the best iterate found."""

    def __init__(self, message, best=None, history=None):
        super().__init__(message)
        self.best = best
        self.history = history if history is not None else []


class ResolutionInsufficient(FreewaveError, RuntimeError):
    def __init__(self, message, tail_ratio=None):
        super().__init__(message)
        self.tail_ratio = tail_ratio


class FlatCollapse(FreewaveError, RuntimeError):
    pass


class BlowUp(FreewaveError, FloatingPointError):
    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state
