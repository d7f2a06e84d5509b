class InfralogError(Exception):
    """Base class for library errors."""


class BudgetExceeded(InfralogError):
    """An enumeration would exceed the configured cap."""


class TypeSyntaxError(InfralogError, ValueError):
    pass


class FormulaSyntaxError(InfralogError):
    def __init__(self, message: str, position: int | None = None, expected: str | None = None):
        self.position = position
        self.expected = expected
        where = f" at offset {position}" if position is not None else ""
        exp = f" (expected {expected})" if expected else ""
        super().__init__(f"{message}{where}{exp}")


class FormulaTypeError(InfralogError):
    """Ill-typed atom, unknown symbol or inconsistent variable use."""


class InvalidSystem(InfralogError):
    """A system violates its structural invariants."""


class SignatureMismatch(InfralogError):
    pass


class EvaluationError(InfralogError):
    pass


class NoProperFilter(InfralogError):
    pass


class ProviderFailure(InfralogError):
    pass


class NotAFilter(InfralogError, ValueError):
    """An ensemble used as a filter is not upward closed or not closed under intersection."""


class SourceError(InfralogError):
    """A malformed input file, located by file and line."""

    def __init__(self, source: str, line: int, rule: str, message: str):
        self.source = source
        self.line = line
        self.rule = rule
        super().__init__(f"{source}:{line}: [{rule}] {message}")
