"""Exception hierarchy.

Data problems (bad files, bad numbers) and configuration problems (bad
parameters) are kept apart so the CLI can map them to distinct exit codes.
"""


class AGPError(Exception):
    """Base class for all library errors."""


class DataError(AGPError):
    pass


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(DataError):
    pass


class EmptyGraphError(DataError):
    pass


class NumericError(DataError):
    pass


class ShapeError(DataError):
    pass


class EmptySweepError(DataError):
    pass


class ConfigError(AGPError):
    pass
