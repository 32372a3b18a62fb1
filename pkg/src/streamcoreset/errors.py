"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class CoresetError(Exception):
    exit_code = 1


class ConfigError(CoresetError, ValueError):
    """Invalid parameters (epsilon out of range, bad sizes, ...)."""

    exit_code = 2


class DimensionError(ConfigError):
    """A row does not match the dimension of the structure it is fed to."""


class InputFormatError(CoresetError, ValueError):
    """Malformed input file: ragged rows, bad numbers, unsorted triplets."""

    exit_code = 3

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericalError(CoresetError, ArithmeticError):
    """Eigensolver/SVD failure or an otherwise degenerate numerical state."""

    exit_code = 4
