"""Exception hierarchy shared across the toolkit."""


class BoundkitError(Exception):
    """Base class for all toolkit errors."""


class DataError(BoundkitError):
    """Invalid input data: bad file contents, empty corpora, contract violations."""


class ParseError(DataError):
    """A file failed to parse; carries the 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class TrainingError(DataError):
    """Training cannot proceed on the given corpus/configuration."""


class InvariantError(BoundkitError):
    """An internal invariant was violated; indicates a bug, not bad input."""
