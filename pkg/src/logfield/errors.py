"""Exception hierarchy.

Every error carries a short ``kind`` string used by the CLI's JSON error
objects (``{"error": kind, "detail": ...}``).
"""


class LogfieldError(Exception):
    kind = "Error"


class BudgetExhausted(LogfieldError):
    """The observation budget ran out before the answer was settled.

    This never asserts anything about the series being observed.
    """

    kind = "BudgetExhausted"

    def __init__(self, what="steps", limit=None):
        self.what = what
        self.limit = limit
        flag = "--max-steps" if what == "steps" else "--max-terms"
        msg = f"budget exhausted ({what} limit {limit}); raise {flag} or LOGFIELD_BUDGET"
        super().__init__(msg)


class ZeroSeries(LogfieldError):
    kind = "ZeroSeries"


class DivisionByZero(LogfieldError, ZeroDivisionError):
    kind = "DivisionByZero"


class NotSmall(LogfieldError):
    kind = "NotSmall"


class NotInfIncreasing(LogfieldError):
    kind = "NotInfIncreasing"


class NonPositiveLeading(LogfieldError):
    kind = "NonPositiveLeading"


class IrrationalScalar(LogfieldError):
    kind = "IrrationalScalar"


class LargePartNotLogLinear(LogfieldError):
    kind = "LargePartNotLogLinear"


class HasExpPart(LogfieldError):
    kind = "HasExpPart"


class SummabilityViolation(LogfieldError):
    kind = "SummabilityViolation"


class ShapeNotSupported(LogfieldError):
    kind = "ShapeNotSupported"


class MalformedInput(LogfieldError, ValueError):
    kind = "MalformedInput"


class BelowThreshold(LogfieldError, ValueError):
    kind = "BelowThreshold"


class UnboundName(LogfieldError, NameError):
    kind = "UnboundName"


class DSLSyntaxError(LogfieldError, SyntaxError):
    kind = "SyntaxError"

    def __init__(self, msg, line=1, col=1):
        self.detail = msg
        self.line = line
        self.col = col
        text = f"{msg} at line {line}, column {col}"
        Exception.__init__(self, text)
        self.msg = text

    def __str__(self):
        return self.msg


class DSLTypeError(LogfieldError, TypeError):
    kind = "TypeError"
