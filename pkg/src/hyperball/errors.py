"""Exception hierarchy.

Each family maps to one CLI exit status: configuration problems exit 1,
data problems exit 2, numeric failures exit 3.
"""


class HyperballError(Exception):
    exit_code = 1


class ConfigError(HyperballError, ValueError):
    exit_code = 1


class InvalidTemperatureError(ConfigError):
    pass


class ShapeError(HyperballError, ValueError):
    exit_code = 1


class UnsupportedModeError(HyperballError, ValueError):
    exit_code = 1


class DataError(HyperballError, ValueError):
    exit_code = 2


class InvalidInputError(DataError):
    """Non-finite or otherwise unusable numeric input."""


class InvalidDatasetError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, path, line, column, message):
        self.path = path
        self.line = line
        self.column = column
        super().__init__(f"{path}:{line}:{column}: {message}")


class UndefinedMetricError(DataError):
    """AP with no positives, Pearson with zero variance, mAP with no scored class."""


class NumericFailure(HyperballError, ArithmeticError):
    exit_code = 3

    def __init__(self, message, parameter=None):
        self.parameter = parameter
        super().__init__(message if parameter is None else f"{message} (parameter: {parameter})")


class NumericalDegeneracyError(NumericFailure):
    pass
