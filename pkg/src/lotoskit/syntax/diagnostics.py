"""Diagnostics shared by all parsers and the static validator.

A diagnostic never raises; parsers and validators collect them and hand
the list back to the caller.  Every diagnostic carries a source span
(1-based line/column, end exclusive) and a stable machine-readable code
so tests and tools can match on it without parsing message text.
"""
from __future__ import annotations

from dataclasses import dataclass

# Stable diagnostic codes.  Keep these in sync with README.md.
LEX_ERROR = "lex-error"
SYNTAX_ERROR = "syntax-error"
DUPLICATE_DEFINITION = "duplicate-definition"
UNKNOWN_PROCESS = "unknown-process"
UNKNOWN_SORT = "unknown-sort"
UNKNOWN_GATE = "unknown-gate"
GATE_ARITY_MISMATCH = "gate-arity-mismatch"
UNBOUND_VARIABLE = "unbound-variable"
SHADOWS_VALUE = "shadows-value"
LIBRARY_NOT_SUPPORTED = "library-not-supported"
INTERNAL_ACTION_OFFERS = "internal-action-offers"
RESERVED_NAME = "reserved-name"
UNKNOWN_PREDICATE = "unknown-predicate"
BAD_ARITY = "bad-arity"
MALFORMED_IC = "malformed-ic"
UNKNOWN_QUERY_VARIABLE = "unknown-query-variable"


@dataclass(frozen=True)
class Span:
    """Half-open source span; columns count characters, tabs included."""

    line: int
    col: int
    end_line: int
    end_col: int

    @classmethod
    def point(cls, line: int, col: int) -> "Span":
        return cls(line, col, line, col + 1)

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    span: Span
    message: str
    code: str

    def __str__(self) -> str:
        return f"{self.span}: {self.severity}[{self.code}]: {self.message}"


def error(message: str, span: Span | None, code: str) -> Diagnostic:
    return Diagnostic("error", span or Span.point(1, 1), message, code)


def warning(message: str, span: Span | None, code: str) -> Diagnostic:
    return Diagnostic("warning", span or Span.point(1, 1), message, code)


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diagnostics)
