"""
Error hierarchy shared by every app.

Each family carries the process exit code the command line maps it to:
2 configuration, 3 ingestion, 4 singular design, 5 bootstrap failure.
"""


class MvbootError(Exception):
    exit_code = 1

    @property
    def code(self):
        return type(self).__name__

    def as_dict(self):
        return {'error': self.code, 'exit_code': self.exit_code, 'detail': str(self)}


# Configuration (exit 2)

class ConfigError(MvbootError):
    exit_code = 2


class InvalidConfiguration(ConfigError):
    pass


class DimensionMismatch(ConfigError):
    pass


class UnequalSupportSizes(ConfigError):
    pass


class BlockNotSPD(ConfigError):
    pass


class GradientMismatch(ConfigError):
    pass


# Ingestion (exit 3)

class IngestionError(MvbootError):
    exit_code = 3


class MissingColumn(IngestionError):
    pass


class NonNumericCell(IngestionError):
    def __init__(self, row, column, value):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"row {row}, column '{column}': cannot parse {value!r} as a number")


class EmptyData(IngestionError):
    pass


class RankDeficientAfterEncoding(IngestionError):
    pass


class InvalidDataset(IngestionError):
    pass


# Linear algebra (exit 4)

class LinearAlgebraError(MvbootError):
    exit_code = 4


class AsymmetricInput(LinearAlgebraError):
    pass


class NearSingular(LinearAlgebraError):
    pass


class SingularDesign(NearSingular):
    pass


# Bootstrap (exit 5)

class BootstrapError(MvbootError):
    exit_code = 5


class SingularResamples(BootstrapError):
    pass


class InsufficientDraws(BootstrapError):
    pass


class DegenerateResiduals(BootstrapError):
    pass
