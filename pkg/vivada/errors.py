from typing import Optional


class VivadaError(Exception):
    """Root of every error raised on purpose by this package."""

    exit_code = 1


# -- usage ------------------------------------------------------------------


class UsageError(VivadaError):
    exit_code = 2


# -- data / format ----------------------------------------------------------


class DataError(VivadaError):
    exit_code = 3


class FormatError(DataError):
    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class ParseError(DataError):
    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class SchemaVersionError(DataError):
    pass


class IntegrityError(DataError):
    pass


class LeakageError(DataError):
    pass


class CrawlExhaustedError(DataError):
    pass


# -- numeric ----------------------------------------------------------------


class NumericError(VivadaError):
    exit_code = 4


class DimensionError(NumericError):
    pass


class DomainError(NumericError):
    pass


class TrainingDivergedError(NumericError):
    """Loss went non-finite. `params` holds the last good parameter set."""

    def __init__(self, message: str, params=None, epoch: Optional[int] = None):
        super().__init__(message)
        self.params = params
        self.epoch = epoch


class UndefinedMetricError(UsageError):
    """A metric has no value on this input (one class only, zero variance)."""
