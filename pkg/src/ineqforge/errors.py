"""Exception hierarchy shared by every ineqforge module."""


class IneqForgeError(Exception):
    """Base class for all errors raised by ineqforge."""


class InvalidParams(IneqForgeError, ValueError):
    """Family parameters outside their validity range."""


class NonPositive(IneqForgeError, ValueError):
    """A function sample was not strictly positive."""


class OutOfDomain(IneqForgeError, ValueError):
    """Evaluation point outside of the declared domain."""


class DomainError(IneqForgeError, ValueError):
    """The interval is unsuitable for the requested operation (e.g. lo <= 0)."""


class NonFinite(IneqForgeError, ArithmeticError):
    """An integrand returned inf or nan."""


class BudgetExceeded(IneqForgeError, RuntimeError):
    """Quadrature ran out of function evaluations before converging."""


class ParseError(IneqForgeError, ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ValidationError(IneqForgeError, ValueError):
    def __init__(self, field: str, message: str = ""):
        super().__init__(f"invalid field {field!r}" + (f": {message}" if message else ""))
        self.field = field


class EmptyReport(IneqForgeError, ValueError):
    """Refusing to emit a report with no entries."""
