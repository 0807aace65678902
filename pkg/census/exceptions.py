"""Errors raised by the census engine"""


class PermCensusError(Exception):
    """Base class for every error raised by the census app"""


class NotPrime(PermCensusError, ValueError):
    """The requested characteristic is not a prime"""


class DegreeTooLarge(PermCensusError, ValueError):
    """p^k exceeds the supported field order"""


class DivisionByZero(PermCensusError, ZeroDivisionError):
    """Inverse of the zero element was requested"""


class DimensionMismatch(PermCensusError, ValueError):
    """Operands have incompatible shapes"""


class RankOutOfRange(PermCensusError, ValueError):
    """A rank outside 0..k was requested"""


class PreconditionViolated(PermCensusError, ValueError):
    """Input lies outside the domain a construction is defined on"""


class EvenCharacteristic(PermCensusError, ValueError):
    """Construction needs 1/2 and the field has characteristic 2"""


class ZeroAlpha(PermCensusError, ValueError):
    """The free parameter of the prescribed per/det family must be nonzero"""


class FieldSpecError(PermCensusError, ValueError):
    """A field spec string such as "3^2" could not be parsed"""


class MatrixParseError(PermCensusError, ValueError):
    """A matrix or element literal could not be parsed"""


class BudgetExceeded(PermCensusError):
    """An exhaustive run would evaluate more objects than allowed"""

    def __init__(self, required, budget, what="matrices"):
        self.required = required
        self.budget = budget
        self.what = what
        super().__init__(
            f"exhaustive run needs {required} {what} but the budget is {budget}; "
            f"raise it with --budget {required} or PERMCENSUS_BUDGET"
        )
