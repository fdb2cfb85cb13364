"""Exception hierarchy for numrad."""

from typing import Optional


class NumradError(ValueError):
    """Base class for every error raised by numrad."""


class NonSquareError(NumradError):
    pass


class NotHermitianError(NumradError):
    pass


class NegativeSpectrumError(NumradError):
    pass


class WrongDimensionError(NumradError):
    pass


class NotPSDError(NumradError):
    pass


class NotUnitError(NumradError):
    pass


class InvalidPairError(NumradError):
    pass


class NegativeInputError(NumradError):
    pass


class OutOfRangeError(NumradError):
    pass


class UnknownBoundError(NumradError):
    pass


class MissingParamError(NumradError):
    pass


class DimensionMismatchError(NumradError):
    pass


class DimOutOfRangeError(NumradError):
    pass


class MatrixParseError(NumradError):
    """Raised when a matrix document is malformed; ``index`` names the bad entry."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class ConfigError(NumradError):
    """Raised for invalid suite configuration, with field or position details."""

    def __init__(self, message: str, field: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        location = []
        if field:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}" + (f", column {column}" if column is not None else ""))
        if location:
            message = f"{message} ({'; '.join(location)})"
        super().__init__(message)
        self.field = field
        self.line = line
        self.column = column
