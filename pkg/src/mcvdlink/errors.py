"""Semantic exception hierarchy shared by all mcvdlink modules.

Every error carries a short machine-readable ``code`` so the sweep CLI can
spell failed cells as ``ERR:<code>`` instead of crashing mid-table.
"""


class McvdLinkError(Exception):
    """Base class for all mcvdlink errors."""

    code = "error"


class DomainError(McvdLinkError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    code = "domain"


class AccuracyError(McvdLinkError, ArithmeticError):
    """A quadrature did not reach the requested tolerance.

    Carries the best available estimate and its error bound so callers can
    decide whether the partial answer is still usable.
    """

    code = "accuracy"

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class RangeOverflowError(McvdLinkError, OverflowError):
    """A Bell-polynomial term overflowed; ``index`` names the first bad n."""

    code = "range"

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class UnsupportedModeError(McvdLinkError, ValueError):
    """The operation does not apply to the configured tagged-transmitter mode."""

    code = "unsupported-mode"


class UnsupportedSizeError(McvdLinkError, ValueError):
    """A reference-only routine was asked for more than its size cap."""

    code = "unsupported-size"


class DivergenceError(McvdLinkError, ArithmeticError):
    """The requested quantity is infinite for this configuration."""

    code = "divergence"
