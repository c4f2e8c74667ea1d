"""Exception hierarchy shared across the package."""


class IsacError(Exception):
    """Base class for all package-specific errors."""


class UnknownVariableError(IsacError, NameError):
    """A variable name was not found in (or collides with) a distribution."""


class DegenerateEventError(IsacError):
    """Conditioning on an event of probability zero."""


class SizeLimitError(IsacError):
    """A dense tensor would exceed the supported size cap."""


class SchemaError(IsacError):
    """Inconsistent alphabets or kernel shapes when assembling a joint."""


class ArgumentError(IsacError, ValueError):
    """An argument is outside its documented domain."""


class TooLargeError(IsacError):
    """A brute-force enumeration would exceed its parameter cap."""


class NumericalError(IsacError):
    """An internal numerical sanity check failed (beyond round-off floors)."""


class ParseError(IsacError):
    """A channel spec document failed to parse; carries line/column anchors."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UsageError(IsacError):
    """Unsupported command-line flag combination."""
