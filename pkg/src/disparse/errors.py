"""Shared exception types."""


class DisparseError(Exception):
    """Base class for all toolkit errors."""


class ParseError(DisparseError):
    """A malformed record in an input file.

    Carries the position (line number) of the offending record when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IntegrityError(DisparseError):
    """Structurally invalid conversation data (dangling parent, cycle, ...)."""


class ConfigError(DisparseError):
    """Invalid feature, model, or experiment configuration."""


class GoldContextError(DisparseError):
    """Gold-label context was requested for a branch that carries no labels."""
