"""Exception types shared across the package."""


class FrameletMagnetError(Exception):
    """Base class for all library errors."""


class InvalidCharge(FrameletMagnetError):
    """Charge parameter outside the admissible range [0, 0.25]."""


class UnknownBank(FrameletMagnetError):
    """Requested filter bank name is not one of the built-in banks."""


class NotMRABank(FrameletMagnetError):
    """Scaling-function check requested for a bank with no scaling functions."""


class ShapeMismatch(FrameletMagnetError):
    """Signal or coefficient shapes do not match the transform."""


class IndexOutOfRange(FrameletMagnetError):
    """Node, level, or band index outside its valid range."""


class ConvergenceFailure(FrameletMagnetError):
    """Eigensolver failed or returned a decomposition violating its contract."""


class InsufficientClassMembers(FrameletMagnetError):
    """A labelled split cannot be built with the requested quotas."""


class RetryExhausted(FrameletMagnetError):
    """Randomized edge removal could not satisfy its constraints."""


class NonFiniteLoss(FrameletMagnetError):
    """Training produced a NaN or infinite loss (divergence signal)."""


class DataFormatError(FrameletMagnetError):
    """Malformed graph, feature, label, signal, or config data."""
