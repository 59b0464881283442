"""Exception hierarchy shared by all modules."""


class GraphFieldError(Exception):
    """Base class for every error raised by the package."""


class DivisionByZero(GraphFieldError, ZeroDivisionError):
    pass


class DivisorZero(DivisionByZero):
    """Polynomial division or fraction construction with a zero divisor."""


class InternalReducibility(GraphFieldError):
    """A minimal polynomial shared a factor with an element being inverted.

    The curves are geometrically integral, so this only happens on a bug.
    """


class VertexOutOfRange(GraphFieldError, IndexError):
    pass


class ColumnNotRealized(GraphFieldError, LookupError):
    pass


class CodeOutOfDomain(GraphFieldError, LookupError):
    pass


class ZeroInverse(DivisionByZero):
    pass


class BudgetExceeded(GraphFieldError):
    """A semi-decision search ran out of its configured step allowance."""

    def __init__(self, message, steps=None):
        super().__init__(message)
        self.steps = steps


class NotAPoint(GraphFieldError):
    """A pair claimed to lie on the curve p = 0 does not."""


class PrecisionCapExceeded(GraphFieldError):
    pass


class AssertT20(GraphFieldError):
    """A curve parameter enclosure admits values below 20."""


class ExprSyntaxError(GraphFieldError, ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class SymbolError(GraphFieldError, ValueError):
    pass


class InputError(GraphFieldError, ValueError):
    """Malformed graph, morphism, permutation or dump file."""
