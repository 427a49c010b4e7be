class DataError(ValueError):
    """Raised when interaction data cannot be loaded or used."""


class ParseError(DataError):
    """Raised for a malformed line in an interaction file."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"Line {line_number}: {message}")
        self.line_number = line_number


class EmptyDatasetError(DataError):
    """Raised when loading or filtering leaves no interactions."""


class SamplingError(DataError):
    """Raised when a user has too few negative items to sample from."""


class DimensionMismatchError(ValueError):
    """Raised when code or embedding dimensions disagree."""


class CodeFileError(ValueError):
    """Raised for unreadable code or embedding files."""


class EmptyInstanceError(ValueError):
    """Raised when a user or item has no triplets to build a subproblem from."""


class SolverCapacityError(ValueError):
    """Raised when the exhaustive solver is asked for more than 16 bits."""


class NumericalError(ArithmeticError):
    """Raised when training produces non-finite values."""


class DivergenceError(NumericalError):
    """Raised when a training objective becomes non-finite. The report
    recorded up to that point is attached."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
