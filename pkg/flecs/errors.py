# MIT License: Copyright (c) 2022 flecs-kit developers

from typing import Optional


class ConfigError(ValueError):
    """Invalid configuration value or hyperparameter."""


class DataError(ValueError):
    """Unreadable or inconsistent input data."""


class ParseError(DataError):
    def __init__(self, message: str, line_number: Optional[int] = None):
        """
        Error raised while parsing a text format.

        :param message: The error message.
        :param line_number: The 1-based number of the offending line, if known.
        """
        if line_number is not None:
            message = "Line {}: {}".format(line_number, message)
        super().__init__(message)
        self.line_number = line_number


class DimensionError(ValueError):
    """Shape mismatch between operands."""


class NumericError(ValueError):
    """Non-finite values, or matrices breaking a numerical property such as symmetry."""
