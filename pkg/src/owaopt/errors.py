"""Exception hierarchy shared by every module."""


class OwaError(Exception):
    """Base class for all package errors."""


class DimensionError(OwaError, ValueError):
    """Vector or matrix shapes do not agree."""


class ParameterError(OwaError, ValueError):
    """A parameter is outside its admissible range."""


class InfeasibleError(OwaError):
    """The instance has no feasible solution, or a solution is not in Phi."""


class EnumerationTooLarge(OwaError):
    """Enumerating the feasible set would exceed the requested limit."""


class BudgetError(OwaError):
    """A dynamic program or subproblem family exceeded its budget."""


class CapabilityError(OwaError):
    """The operation does not support this problem kind."""


class ParseError(OwaError, ValueError):
    """Malformed instance or formula input."""

    def __init__(self, message, *, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field
