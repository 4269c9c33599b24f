"""Exception hierarchy.

Domain errors (poles, violated hypotheses) are distinguished from usage
errors so the command line can map them to different exit codes.
"""


class AppdoError(Exception):
    """Base class for every error raised by the package."""


class DomainError(AppdoError):
    """A mathematical precondition failed for otherwise well-formed input."""


class PoleError(DomainError):
    """A coefficient function was evaluated at one of its poles."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class HypothesisError(DomainError):
    """An operation's stated hypothesis does not hold for the given symbol."""


class SymbolClassError(DomainError):
    """Symbol class parameters violate 0 < rho <= 1, 0 <= delta < 1, delta <= rho."""


class DimensionError(AppdoError, ValueError):
    """Vector lengths, generator counts or grid shapes disagree."""


class WindowCapError(AppdoError):
    """An enumeration would exceed the configured element cap."""

    def __init__(self, size, cap):
        super().__init__(f"window of {size} elements exceeds the cap of {cap}")
        self.size = size
        self.cap = cap


class IndependenceError(AppdoError):
    """The probe found a small rational relation among the generators."""


class ExprSyntaxError(AppdoError, ValueError):
    """Malformed coefficient expression."""

    def __init__(self, message, text="", pos=None):
        where = "" if pos is None else f" at position {pos}"
        super().__init__(f"{message}{where}: {text!r}" if text else f"{message}{where}")
        self.pos = pos
        self.text = text


class SchemaError(AppdoError, ValueError):
    """A symbol file does not follow the expected layout."""

    def __init__(self, message, field=None, line=None):
        parts = [message]
        if field is not None:
            parts.append(f"field {field!r}")
        if line is not None:
            parts.append(f"line {line}")
        super().__init__("; ".join(parts))
        self.field = field
        self.line = line


class DerivativeOrderError(DomainError):
    """A derivative was requested beyond the configured symbolic order."""
