"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed input file; carries the offending 1-based line number."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold for the input."""


class InvariantViolation(AssertionError):
    """An internal invariant of the orientation machinery was broken (a bug)."""


class BudgetExceeded(ValueError):
    """Instance is larger than the configured exhaustive-search budget."""
