"""Exception hierarchy shared by the library and the command-line front end.

Every exception carries the process exit code that `mfeeg` uses when it
surfaces at the command line: 1 for usage/configuration problems, 2 for
problems with the input data and 3 for numerical failures.
"""

from typing import Optional


class MfeegError(Exception):
    """Base class of all errors raised by mfeeg."""
    exit_code = 1


class ConfigError(MfeegError, ValueError):
    """An invalid configuration or argument combination."""
    exit_code = 1


class DataError(MfeegError):
    """The input data cannot be used as given."""
    exit_code = 2


class NumericalError(MfeegError, ArithmeticError):
    """A computation could not produce a trustworthy number."""
    exit_code = 3


# Configuration
class KTooLarge(ConfigError):
    pass


class DimensionMismatch(ConfigError):
    pass


class GridTooCoarse(ConfigError):
    pass


# Data
class NonFiniteSample(DataError):
    pass


class SeriesTooShort(DataError):
    pass


class MissingQ2(DataError):
    pass


class SingleClass(DataError):
    pass


class ClassTooSmall(DataError):
    pass


class MissingSet(DataError):
    pass


class EmptyFile(DataError):
    pass


class ParseError(DataError):
    """A signal file line that is not a finite number.

    :param path: The offending file.
    :param line: The 1-based line number.
    :param content: The raw line content, if available.
    """
    def __init__(self, path: str, line: int, content: Optional[str] = None):
        self.path = path
        self.line = line
        self.content = content
        msg = f'{path}: line {line}: cannot parse sample'
        if content is not None:
            msg += f' {content!r}'
        super().__init__(msg)

    def __reduce__(self):
        # Worker processes send exceptions back pickled
        return (self.__class__, (self.path, self.line, self.content))


# Numerical
class DegenerateGrid(NumericalError):
    pass


class ScaleTooLarge(NumericalError):
    pass


class FitUnderdetermined(NumericalError):
    pass


class AllZeroVariance(NumericalError):
    pass


class InsufficientScales(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


class EmbeddingFailure(NumericalError):
    pass


class UndefinedMetric(NumericalError):
    pass
