from .._src.utils.errors import (
    DataError,
    ParseError,
    EmptyDatasetError,
    SamplingError,
    DimensionMismatchError,
    CodeFileError,
    EmptyInstanceError,
    SolverCapacityError,
    NumericalError,
    DivergenceError,
)


__all__ = [
    "DataError",
    "ParseError",
    "EmptyDatasetError",
    "SamplingError",
    "DimensionMismatchError",
    "CodeFileError",
    "EmptyInstanceError",
    "SolverCapacityError",
    "NumericalError",
    "DivergenceError",
]
