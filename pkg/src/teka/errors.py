"""Exception types shared across the package.

Input-side problems (bad files, malformed records, inconsistent
configuration) raise ``InputError`` subclasses and map to CLI exit code 1.
Numeric failures (kernel underflow, degenerate alignments or time axes)
raise ``NumericError`` subclasses and map to exit code 2.
"""


class TekaError(Exception):
    """Base class for all package errors."""


class InputError(TekaError):
    """Invalid input data or configuration."""


class ParseError(InputError):
    """Malformed record in a dataset file."""

    def __init__(self, message, path=None, line=None):
        if path is not None and line is not None:
            message = f"{path}:{line}: {message}"
        super().__init__(message)
        self.path = path
        self.line = line


class ConfigError(InputError):
    """Inconsistent or incomplete run configuration."""


class NumericError(TekaError):
    """Numeric failure inside kernel or alignment computations."""


class KernelUnderflowError(NumericError):
    """The kernel value underflowed to exactly zero; try a smaller nu."""


class DegenerateAlignmentError(NumericError):
    """A posterior row carries no probability mass."""


class DegenerateTimeError(NumericError):
    """Resampling impossible because all timestamps coincide."""
