"""Coded diagnostics for static rejections and failed rule premises."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from azc.errors import ErrorKind, EvalError, StaticError
from azc.syntax.ast import NO_SPAN, SourceSpan
from azc.syntax.lexer import LexError


class Severity(enum.Enum):
    STATIC = "static"
    RUNTIME = "runtime"

    def __str__(self) -> str:
        return self.value


RUNTIME_CODES = {
    ErrorKind.NOT_READABLE: "E-NOT-READABLE",
    ErrorKind.NOT_WRITEABLE: "E-NOT-WRITEABLE",
    ErrorKind.NOT_UNIQUE: "E-NOT-UNIQUE",
    ErrorKind.ALIAS_TARGET_SHARED: "E-ALIAS-TARGET-SHARED",
    ErrorKind.ALIAS_MUTABILITY_MISMATCH: "E-ALIAS-MUTABILITY",
    ErrorKind.IMMUTABLE_MUTATION: "E-IMMUTABLE-MUTATION",
    ErrorKind.UNDEFINED_VARIABLE: "E-UNDEFINED-VARIABLE",
    ErrorKind.UNKNOWN_FIELD: "E-NO-SUCH-FIELD",
    ErrorKind.CALLEE_NOT_FUNCTION: "E-CALLEE-NOT-FUNCTION",
    ErrorKind.CONDITION_NOT_BOOLEAN: "E-CONDITION-NOT-BOOLEAN",
    ErrorKind.COPY_OF_UNDEFINED: "E-COPY-OF-UNDEFINED",
    ErrorKind.MISSING_RETURN: "E-MISSING-RETURN",
}

STATIC_CODES = frozenset(
    {
        "E-LEX",
        "E-PARSE",
        "E-DUPLICATE-PARAMETER",
        "E-DUPLICATE-ARGUMENT",
        "E-SHADOWING",
        "E-UNKNOWN-VARIABLE",
        "E-CAPTURE",
        "E-UNKNOWN-FIELD",
        "E-UNKNOWN-TYPE",
        "E-NOT-A-FUNCTION-TYPE",
        "E-NOT-A-STRUCT-TYPE",
        "E-MALFORMED-QUALIFIERS",
        "E-MISSING-ARGUMENT",
        "E-UNKNOWN-PARAMETER",
        "E-IO",
    }
)

ALL_CODES = STATIC_CODES | frozenset(RUNTIME_CODES.values())

_TEMPLATES = {
    ErrorKind.NOT_READABLE: "`{s}` is not readable (state: {state})",
    ErrorKind.NOT_WRITEABLE: "`{s}` is not writeable (state: {state})",
    ErrorKind.NOT_UNIQUE: "`{s}` is not unique (state: {state})",
    ErrorKind.ALIAS_TARGET_SHARED: "`{s}` is shared and cannot be rebound by alias",
    ErrorKind.ALIAS_MUTABILITY_MISMATCH: "`{s}` has borrowers whose mutability conflicts with this alias",
    ErrorKind.IMMUTABLE_MUTATION: "`{s}` is not mutating",
    ErrorKind.UNDEFINED_VARIABLE: "`{s}` is not bound in this scope",
    ErrorKind.UNKNOWN_FIELD: "no field `{s}` in this value",
    ErrorKind.CALLEE_NOT_FUNCTION: "`{s}` is not a function",
    ErrorKind.CONDITION_NOT_BOOLEAN: "condition `{s}` is not a boolean",
    ErrorKind.COPY_OF_UNDEFINED: "`{s}` reaches an undefined value and cannot be copied",
    ErrorKind.MISSING_RETURN: "`return` outside of a function body",
}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: Severity
    message: str
    span: SourceSpan
    state: Optional[str] = None


def from_runtime(err: EvalError) -> Diagnostic:
    state = str(err.state) if err.state is not None else None
    message = _TEMPLATES[err.kind].format(s=err.subject, state=state)
    return Diagnostic(RUNTIME_CODES[err.kind], Severity.RUNTIME, message, err.span or NO_SPAN, state)


def from_static(err: Exception) -> Diagnostic:
    if isinstance(err, LexError):
        return Diagnostic("E-LEX", Severity.STATIC, err.message, err.span)
    if isinstance(err, StaticError):
        return Diagnostic(err.code, Severity.STATIC, err.message, err.span or NO_SPAN)
    raise TypeError(f"not a diagnostic source: {err!r}")


def io_error(message: str) -> Diagnostic:
    return Diagnostic("E-IO", Severity.STATIC, message, NO_SPAN)


def from_exception(err: Exception) -> Diagnostic:
    if isinstance(err, EvalError):
        return from_runtime(err)
    return from_static(err)


def render(d: Diagnostic, source: str = "") -> str:
    """Summary line, location line, then the offending source line underlined."""
    lines = [f"{d.severity} error: {d.message}", f" --> {d.span.line}:{d.span.column} [{d.code}]"]
    source_lines = source.split("\n")
    if source and d.span is not NO_SPAN and d.span.line <= len(source_lines):
        text = source_lines[d.span.line - 1]
        start = d.span.column - 1
        width = max(1, min(d.span.end_offset - d.span.start_offset, len(text) - start))
        gutter = " " * len(str(d.span.line))
        lines.append(f"{gutter} |")
        lines.append(f"{d.span.line} | {text}")
        lines.append(f"{gutter} | {' ' * start}{'^' * width}")
    return "\n".join(lines)


def render_record(d: Diagnostic) -> str:
    """One machine-readable line with a fixed field order."""
    state = d.state if d.state is not None else "-"
    return (
        f"code={d.code} severity={d.severity} line={d.span.line} "
        f"column={d.span.column} state={state}"
    )
