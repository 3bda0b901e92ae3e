"""Exception hierarchy shared by the library and the command line front end."""


class DiscalgError(Exception):
    """Base class for every error raised by this package."""


class UsageError(DiscalgError, ValueError):
    """An operation was called with arguments outside its contract."""


class ValidationError(DiscalgError, ValueError):
    """Well-formed input that is semantically unacceptable (wrong arity, unbound name, ...)."""


class ParseError(DiscalgError, ValueError):
    """Malformed text; carries the 1-based line and column of the offending token."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column
