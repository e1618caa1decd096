"""Exception types shared across the toolkit."""

from __future__ import annotations


class ClssmtError(Exception):
    """Base class for all toolkit errors."""


class TypeSyntaxError(ClssmtError):
    """Raised by the type parser on malformed input."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class TypeArityError(ClssmtError):
    """Same-named constructors used with different arities."""


class SubstitutionError(ClssmtError):
    """A type variable has no binding in the substitution."""


class RepositoryError(ClssmtError):
    """Raised by the repository parser on malformed or inconsistent input."""


class CoverLimitError(ClssmtError):
    """Path-combination search exceeded the configured bound."""


class NonterminalLimitError(ClssmtError):
    """Inhabitation generated more nonterminals than the configured cap."""


class GrammarFormatError(ClssmtError):
    """Grammar JSON does not match the expected schema."""


class MalformedTreeError(ClssmtError):
    """A vertex layout does not describe a well-formed inhabitant tree."""


class TermSyntaxError(ClssmtError):
    """Raised by the term parser on malformed input."""


class TableError(ClssmtError):
    """Index table construction or lookup failed."""


class ConstraintError(ClssmtError):
    """Structural constraint parsing or compilation failed."""


class SolverNotFoundError(ClssmtError):
    """No external SMT solver could be located."""


class SolverProtocolError(ClssmtError):
    """The external solver produced output we cannot interpret."""
