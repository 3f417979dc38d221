"""Exception types shared across the package."""


class WeakSeqError(Exception):
    """Base class for all package errors."""


class InvalidModulusError(WeakSeqError, ValueError):
    """A modulus that must be an odd prime is not one."""


class ScheduleTooLongError(WeakSeqError, OverflowError):
    """A schedule would leave the signed 64-bit range."""


class HypothesisViolation(WeakSeqError, ValueError):
    """An input violates a mathematical precondition (e.g. p <= m)."""


class CapacityError(WeakSeqError, MemoryError):
    """A dense array would exceed the capacity guard."""


class ShapeMismatch(WeakSeqError, ValueError):
    """Two signals live on different groups."""


class ValidationError(WeakSeqError, ValueError):
    """A stored object fails re-validation of its invariants."""
