"""Exception types raised by the package.

The command line maps any YbionError to exit code 2 and prints its message
verbatim, so messages must be self-contained and name the offending input.
"""


class YbionError(Exception):
    """Base class for all domain errors raised by this package."""


class SchemeError(YbionError):
    """Malformed or inconsistent level-scheme data.

    Parse failures carry the one-based line number of the offending line.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SolverError(YbionError):
    """A numerical routine could not produce a trustworthy result."""
