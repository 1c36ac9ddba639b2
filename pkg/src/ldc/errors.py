"""Shared exception types."""


class LdcError(Exception):
    """Base class for package errors."""


class BoundExceeded(LdcError):
    """A value outgrew the configured bit-width guard."""


class ConstraintViolation(LdcError):
    """A schema side condition failed at evaluation time."""


class TermError(LdcError):
    """A term is structurally ill-formed."""


class ParseError(LdcError):
    """Bad surface syntax; carries a position when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CompileError(LdcError):
    """The compiler cannot lower the given term."""


class UncertifiedWidth(CompileError):
    """A CRN step function lacks a static width-1 certificate."""
