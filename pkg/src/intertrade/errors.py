"""Exception hierarchy shared by the analysis modules."""


class IntertradeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(IntertradeError, ValueError):
    """A malformed row in a tick or duration file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class OrderingError(ParseError):
    """Timestamps go backwards within a trading session."""


class PatternError(IntertradeError, ValueError):
    """The intraday pattern cannot be used for the requested operation."""


class BoxSizeError(IntertradeError, ValueError):
    """A box size outside the admissible range for a series."""


class FitError(IntertradeError, ValueError):
    """Too few points (or a singular design) for a regression."""


class ConfigError(IntertradeError, ValueError):
    """An analysis configuration that fails validation."""
