"""Exception types shared across the package."""

from __future__ import annotations


class LocverError(Exception):
    """Base class for all errors raised by locver."""


class DomainError(LocverError, ValueError):
    """An argument lies outside the domain of an operation (unknown node, non-member, ...)."""


class UsageError(LocverError, TypeError):
    """The caller combined arguments in an unsupported way (e.g. arity mismatch)."""


class ParseError(LocverError, ValueError):
    """A text file or byte string could not be decoded."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class CoverError(DomainError):
    """A voltage assignment produced a disconnected cover."""


class CodecRangeError(DomainError):
    """A Turing-machine system state fell outside the bounded codec."""


class Inconclusive(LocverError):
    """A bounded search ran out of budget before reaching a verdict.

    ``stats`` carries whatever partial counters the search had accumulated.
    """

    def __init__(self, message: str, stats: dict | None = None):
        super().__init__(message)
        self.stats = dict(stats or {})
