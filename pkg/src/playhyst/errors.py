"""Exception hierarchy shared by all modules."""


class HysteresisError(Exception):
    """Base class for every error raised by playhyst."""


class OutOfRange(HysteresisError, ValueError):
    """A value has an empty preimage under a curve."""


class ConstraintOrderViolation(HysteresisError, ValueError):
    """The right constraint curve exceeds the left one."""


class SlopeUnavailable(HysteresisError):
    """A derivative was requested from a non-Lipschitz truncation."""


class InadmissibleInit(HysteresisError, ValueError):
    """An explicit initial state lies outside the constraint band."""


class NotApplicable(HysteresisError):
    """Operation undefined for this kind of model."""


class NegativeWeight(HysteresisError, ValueError):
    """Linear-play calibration produced a negative weight (non-convex data)."""


class DegenerateSlope(HysteresisError, ValueError):
    """A trapezoid side is vertical or has non-positive slope."""


class BudgetExceeded(HysteresisError):
    """Hierarchical calibration ran out of iterations before meeting its targets."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NoConvergence(HysteresisError):
    """The scalar root solver failed to meet its tolerance."""

    def __init__(self, message, step=None, cell=None):
        super().__init__(message)
        self.step = step
        self.cell = cell


class UnknownTarget(HysteresisError, KeyError):
    """No reproduction recipe with this name."""


class ConfigError(HysteresisError, ValueError):
    """Malformed configuration or model file."""
