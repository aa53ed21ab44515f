"""Exception types shared across the package."""


class SimplexVolError(Exception):
    """Base class for all errors raised by simplexvol."""


class SpecParseError(SimplexVolError, ValueError):
    """A simplex or function-spec string could not be parsed."""

    def __init__(self, message, token=None):
        super().__init__(message if token is None else f"{message}: {token!r}")
        self.token = token


class DegenerateSimplexError(SimplexVolError, ValueError):
    """Vertices are affinely dependent (zero or negligible determinant)."""


class DomainError(SimplexVolError, ValueError):
    """A function was evaluated or integrated outside its domain."""


class DivergentIntegralError(SimplexVolError, ValueError):
    """An exponent <= -1 makes the integral diverge."""


class PreconditionError(SimplexVolError, ValueError):
    """Inputs violate a documented precondition of an operation."""


class ExactModeError(SimplexVolError, TypeError):
    """An exact (rational) computation received non-rational data."""


class NumericalFailure(SimplexVolError, ArithmeticError):
    """Iteration did not converge or a floating-point quantity overflowed."""


class IntegrandOverflowError(NumericalFailure, OverflowError):
    """``exp`` of an exponent too large for double precision."""

    def __init__(self, exponent: float):
        super().__init__(f"exp({exponent:.6g}) overflows double precision")
        self.exponent = exponent
