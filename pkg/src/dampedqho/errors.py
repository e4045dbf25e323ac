"""Exception and warning types shared across the package."""


class DampedQHOError(Exception):
    """Base class for all package errors."""

    category = "error"


class DomainError(DampedQHOError, ValueError):
    """An argument lies outside the domain where a formula is defined."""

    category = "domain"


class DegenerateWarpError(DomainError):
    """The time warp is undefined (zero damping or zero integration constant)."""

    category = "degenerate-warp"


class WarpGridError(DampedQHOError):
    """A sampled warp grid is too coarse to meet the requested tolerance.

    ``max_step`` carries the largest grid spacing estimated to be acceptable.
    """

    category = "warp-grid"

    def __init__(self, message, max_step):
        super().__init__(message)
        self.max_step = max_step


class RegimeError(DampedQHOError, ValueError):
    """The requested quantity does not exist in the oscillator's damping regime."""

    category = "regime"


class TruncationError(DampedQHOError):
    """Population reached the top of the truncated mode basis."""

    category = "truncation"

    def __init__(self, message, tail, t):
        super().__init__(message)
        self.tail = tail
        self.t = t


class StepSizeError(DampedQHOError):
    """The adaptive integrator step size underflowed."""

    category = "step-size"


class TruncationWarning(UserWarning):
    """Tail population above the monitor threshold; results may be inaccurate."""


class SmallAngleWarning(UserWarning):
    """Operator translation too large for the small-angle expansion to be trusted."""


class QuadratureSupportWarning(UserWarning):
    """The sample grid does not cover the support of the wavefunction."""
