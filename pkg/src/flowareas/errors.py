"""Exception hierarchy shared by all modules."""


class FlowAreasError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(FlowAreasError, ValueError):
    """Invalid configuration, mapping or generator spec."""


class ParseError(FlowAreasError, ValueError):
    """Input event data could not be parsed.

    ``line`` and ``column`` are 1-based when known.
    """

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class AnalysisError(FlowAreasError, RuntimeError):
    """Pipeline inputs are inconsistent or an analysis step failed."""
