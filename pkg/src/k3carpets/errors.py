"""Exception hierarchy shared by all modules."""


class CarpetError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(CarpetError, ValueError):
    """Invalid numeric parameters (a, b, indices, characteristics...)."""


class DimensionError(CarpetError, ValueError):
    """Objects living in rings of different dimension were combined."""


class DomainError(CarpetError, ValueError):
    """Incompatible or unsupported coefficient domains."""


class UnsupportedBasisError(CarpetError, ValueError):
    """A basis whose lead coefficients are not +1 or -1."""


class PreconditionError(CarpetError, ValueError):
    """An operation was called on input violating its precondition."""


class RankDeficiencyError(CarpetError, ArithmeticError):
    """A matrix expected to have full column rank over Q does not."""


class InvariantViolation(CarpetError, AssertionError):
    """An internal consistency check failed (d*d != 0, failed certificate...)."""


class BudgetExceeded(CarpetError):
    """The wall-clock budget given to a computation ran out."""
