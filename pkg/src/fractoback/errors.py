"""Exception hierarchy shared by every module of the package."""


class FractobackError(Exception):
    """Base class for all errors raised by fractoback."""


class InvalidParams(FractobackError, ValueError):
    """A precondition on orders, indices, arguments or inputs failed."""


class InvalidOrder(FractobackError, ValueError):
    """An order (asymptotic depth or fractional order) is out of range."""


class NoConvergence(FractobackError, ArithmeticError):
    """A series ran out of shells before the tail bound was met."""


class SmallArgument(FractobackError, ValueError):
    """The asymptotic expansion was requested below its threshold."""


class ContourFailure(FractobackError, ArithmeticError):
    """A numerical Laplace inversion produced a non-finite value."""


class LengthMismatch(FractobackError, ValueError):
    pass


class GridTooCoarse(FractobackError, ValueError):
    pass


class GridMismatch(FractobackError, ValueError):
    pass


class QuadratureFailure(FractobackError, ArithmeticError):
    """The two-level quadrature error estimate exceeded its tolerance."""


class PrioriViolation(FractobackError, ValueError):
    """An initial state exceeds the declared a priori bound."""


class ConfigError(FractobackError, ValueError):
    """An experiment configuration is malformed or violates a precondition."""
