"""Exception types and process exit codes shared across the package."""

from __future__ import annotations

EXIT_OK = 0
EXIT_FAILURE = 1
# argparse exits with 2 on bad command lines; keep domain codes clear of it.
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_CONVERGENCE = 4
EXIT_HORIZON = 5


class MccedError(Exception):
    """Base class for package-specific failures."""

    exit_code = EXIT_FAILURE


class ParseError(MccedError):
    """A scenario file or expression file violates the input contract.

    Carries an optional source path, 1-based line number, and the name of
    the violated rule so messages stay anchored to the offending input.
    """

    exit_code = EXIT_PARSE

    def __init__(self, message, path=None, line=None, rule=None):
        self.message = str(message)
        self.path = path
        self.line = line
        self.rule = rule
        super().__init__(str(self))

    def __str__(self):
        prefix = ""
        if self.path is not None:
            prefix = f"{self.path}:"
            if self.line is not None:
                prefix += f"{self.line}:"
            prefix += " "
        elif self.line is not None:
            prefix = f"line {self.line}: "
        suffix = f" [{self.rule}]" if self.rule else ""
        return f"{prefix}{self.message}{suffix}"


class ConvergenceError(MccedError):
    """An iterative solver failed to converge; carries the residual history."""

    exit_code = EXIT_CONVERGENCE

    def __init__(self, message, residuals=()):
        self.residuals = tuple(float(r) for r in residuals)
        super().__init__(message)


class HorizonError(MccedError):
    """A light-cone intersection lies beyond the configured search horizon."""

    exit_code = EXIT_HORIZON


class SingularityError(MccedError):
    """A field or potential was requested on top of its own source point."""


class NumericalLimitError(MccedError):
    """A numerical limit procedure did not stabilize; carries its estimates."""

    def __init__(self, message, estimates=()):
        self.estimates = tuple(estimates)
        super().__init__(message)
