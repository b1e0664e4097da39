"""Exception hierarchy shared by all modules.

Input problems (bad files, bad configs, bad dimensions) derive from
``InputError``; violated mathematical preconditions derive from
``PreconditionError``.  The CLI maps these to exit codes 2 and 3.
"""

from __future__ import annotations


class OkounkovError(Exception):
    pass


class InputError(OkounkovError, ValueError):
    pass


class PreconditionError(OkounkovError):
    pass


class DimensionError(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}, column {column}: " if column is not None else f"line {line}: "
        elif column is not None:
            where = f"column {column}: "
        super().__init__(where + message)
        self.message = message


class ConfigError(InputError):
    pass


class UnsupportedDimensionError(InputError):
    pass


class UndefinedValueError(PreconditionError):
    """The valuation of the zero element was requested."""


class DegenerateConeError(PreconditionError):
    pass


class EmptySliceError(PreconditionError):
    pass


class UnboundedPolytopeError(PreconditionError):
    pass


class DomainError(PreconditionError):
    pass


class BaseLocusError(PreconditionError):
    pass


class KhovanskiiViolation(PreconditionError):
    def __init__(self, message: str, level: int | None = None, missing=()):
        super().__init__(message)
        self.level = level
        self.missing = tuple(missing)
