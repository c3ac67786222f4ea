"""Exception types shared across the package."""


class IrsLabError(Exception):
    pass


class AmbiguousClass(IrsLabError):
    """Trace within the parabolic tie band while strict classification was requested."""


class NotHyperbolic(IrsLabError):
    pass


class BadArc(IrsLabError):
    pass


class NumericFailure(IrsLabError):
    pass


class BudgetExceeded(IrsLabError):
    """A bounded enumeration would exceed its configured cap."""

    def __init__(self, message, count=None, cap=None):
        super().__init__(message)
        self.count = count
        self.cap = cap


class OutOfWindow(IrsLabError):
    pass


class WindowTooShort(IrsLabError):
    pass


class TrivialElement(IrsLabError):
    pass


class UnsupportedMeasure(IrsLabError):
    pass


class EvenPrime(IrsLabError):
    pass


class ZeroArgument(IrsLabError):
    pass


class BadEmbedding(IrsLabError):
    pass


class LengthMismatch(IrsLabError):
    pass


class RadiusMismatch(IrsLabError):
    pass
