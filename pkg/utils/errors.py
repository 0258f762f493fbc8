# Error hierarchy shared by every stage; exit codes match the CLI contract
from typing import Optional

from config.constants import EXIT_CODES


class ProfilerError(Exception):
    """Base error carrying a machine-readable code and a CLI exit code"""

    exit_code = 1

    def __init__(self, message: str = "", line_no: Optional[int] = None, **details):
        self.code = type(self).__name__
        self.message = message or self.code
        self.line_no = line_no
        self.details = details
        if line_no is not None:
            message = f"line {line_no}: {self.message}"
        super().__init__(message or self.code)

    def to_dict(self) -> dict:
        data = {'error': self.code, 'message': self.message}
        if self.line_no is not None:
            data['line_no'] = self.line_no
        if self.details:
            data['details'] = {k: str(v) for k, v in self.details.items()}
        return data


class ConfigError(ProfilerError):
    exit_code = EXIT_CODES['config']


class DataError(ProfilerError):
    exit_code = EXIT_CODES['data']


class NumericError(ProfilerError):
    exit_code = EXIT_CODES['numeric']


# Configuration
class InvalidConfig(ConfigError):
    pass


class MissingPath(ConfigError):
    pass


# Ingestion
class WrongFieldCount(DataError):
    pass


class NonNumericField(DataError):
    pass


class EmptyPath(DataError):
    pass


class PreEpochTimestamp(DataError):
    pass


class MalformedIp(DataError):
    pass


class BatchRejected(DataError):
    pass


class InvalidRecord(DataError):
    pass


class EmptyInput(DataError):
    pass


class InvalidSpec(DataError):
    pass


# Features
class DatasetTooShort(DataError):
    pass


class EmptyCorpus(DataError):
    pass


class DimensionMismatch(DataError):
    pass


# Classifiers
class SingleClassTraining(DataError):
    pass


class InsufficientSamples(DataError):
    pass


class MissingLabel(DataError):
    pass


class InsufficientDays(DataError):
    pass


class TooFewNegativeUsers(DataError):
    pass


class NoOutlierData(DataError):
    pass


class UnknownModelKind(ConfigError):
    pass


# SOM and drift
class InsufficientSpan(DataError):
    pass


class WeekTooSparse(DataError):
    pass


class CurveTooShort(DataError):
    pass


class SourceTooShort(DataError):
    pass


# Time series
class SeriesTooShortForLag(DataError):
    pass


class EmptyEnsemble(DataError):
    pass


class IoError(DataError):
    pass


class ZeroVariance(NumericError):
    pass


class NoMatches(NumericError):
    pass


class ZeroRange(NumericError):
    pass


class AllZeroSeries(NumericError):
    pass


class UndefinedMetric(NumericError):
    pass


class StageError(ProfilerError):
    """Wraps a stage failure with the stage name, keeping the inner exit code"""

    def __init__(self, stage: str, cause: ProfilerError):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")
        self.code = cause.code
        self.exit_code = cause.exit_code

    def to_dict(self) -> dict:
        data = self.cause.to_dict()
        data['stage'] = self.stage
        return data
