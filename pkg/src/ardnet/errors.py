"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Raised when an argument violates a documented precondition."""


class UndefinedRatioError(InvalidInputError):
    """Raised when a norm ratio is requested for the zero matrix."""


class SingularSystemError(InvalidInputError):
    """Raised when W'W is not numerically invertible."""


class CsvParseError(ValueError):
    """Raised when a matrix file cannot be parsed.

    ``line`` and ``column`` are 1-based; ``column`` is None for row-level errors.
    """

    def __init__(self, message, line, column=None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column
