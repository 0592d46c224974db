"""Exception hierarchy shared by every module of the package."""


class HSError(Exception):
    """Base class for all errors raised by hsleaps."""


# zpfield
class NonPrimeModulus(HSError, ValueError):
    pass


class ZeroInverse(HSError, ZeroDivisionError):
    pass


# digits
class EmptySet(HSError, ValueError):
    pass


class BadExponent(HSError, ValueError):
    pass


# poly
class BudgetExceeded(HSError, RuntimeError):
    pass


class ParseError(HSError, ValueError):
    """Grammar error with a 1-based line/column position."""

    def __init__(self, message, line=1, column=1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


# hsd / bivariate
class IndexBeyondLength(HSError, IndexError):
    pass


class ShapeMismatch(HSError, ValueError):
    pass


class BadLength(HSError, ValueError):
    pass


class NotMultipleSupported(HSError, ValueError):
    pass


class BadE(HSError, ValueError):
    pass


class OutsideCoideal(HSError, IndexError):
    pass


class SourceTooShort(HSError, ValueError):
    pass


class InsufficientSupport(HSError, ValueError):
    pass


class BadN(HSError, ValueError):
    pass


# integrate
class WrongCharacteristic(HSError, ValueError):
    pass


class NotLogEnough(HSError, ValueError):
    pass


class BadTp(HSError, ValueError):
    pass


class OracleFailure(HSError, RuntimeError):
    pass


class HypothesisViolated(HSError, AssertionError):
    """A runtime re-check of a proven postcondition failed (implementation bug)."""

    def __init__(self, message, trace=None):
        self.trace = trace
        super().__init__(message)


# leapfinder
class NotFoundWithinBounds(HSError, LookupError):
    """No integral exists inside the search bounds.

    ``exhausted`` is False when the branch cap stopped the search early, in
    which case the verdict is inconclusive.
    """

    def __init__(self, message, reached=0, exhausted=True):
        self.reached = reached
        self.exhausted = exhausted
        super().__init__(message)


class NotLogarithmicInput(HSError, ValueError):
    pass
