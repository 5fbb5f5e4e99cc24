"""Exception types raised by the front end and the evaluator.

Static errors carry a stable diagnostic code.  Runtime errors carry an
:class:`ErrorKind`; :mod:`azc.diagnostics` maps each kind to its code.
"""

from __future__ import annotations

import enum
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from azc.syntax.ast import SourceSpan


class StaticError(Exception):
    """A program rejected before evaluation."""

    code = "E-STATIC"

    def __init__(self, message: str, span: Optional[SourceSpan] = None):
        super().__init__(message)
        self.message = message
        self.span = span


class ParseError(StaticError):
    code = "E-PARSE"

    def __init__(self, message: str, span: SourceSpan, expected: frozenset = frozenset()):
        super().__init__(message, span)
        self.expected = expected


class DuplicateParameter(StaticError):
    code = "E-DUPLICATE-PARAMETER"


class DuplicateArgumentName(StaticError):
    code = "E-DUPLICATE-ARGUMENT"


class ShadowingDeclaration(StaticError):
    code = "E-SHADOWING"


class UnknownVariable(StaticError):
    code = "E-UNKNOWN-VARIABLE"


class CapturedVariable(StaticError):
    code = "E-CAPTURE"


class UnknownField(StaticError):
    code = "E-UNKNOWN-FIELD"


class UnknownType(StaticError):
    code = "E-UNKNOWN-TYPE"


class NotAFunctionType(StaticError):
    code = "E-NOT-A-FUNCTION-TYPE"


class NotAStructType(StaticError):
    code = "E-NOT-A-STRUCT-TYPE"


class MalformedQualifiers(StaticError):
    code = "E-MALFORMED-QUALIFIERS"


class MissingArgument(StaticError):
    code = "E-MISSING-ARGUMENT"


class UnknownParameterName(StaticError):
    code = "E-UNKNOWN-PARAMETER"


class ErrorKind(enum.Enum):
    NOT_READABLE = "NotReadable"
    NOT_WRITEABLE = "NotWriteable"
    NOT_UNIQUE = "NotUnique"
    ALIAS_TARGET_SHARED = "AliasTargetShared"
    ALIAS_MUTABILITY_MISMATCH = "AliasMutabilityMismatch"
    IMMUTABLE_MUTATION = "ImmutableMutation"
    UNDEFINED_VARIABLE = "UndefinedVariable"
    UNKNOWN_FIELD = "UnknownField"
    CALLEE_NOT_FUNCTION = "CalleeNotFunction"
    CONDITION_NOT_BOOLEAN = "ConditionNotBoolean"
    COPY_OF_UNDEFINED = "CopyOfUndefined"
    MISSING_RETURN = "MissingReturn"


class EvalError(Exception):
    """A failed rule premise.

    ``subject`` is the source rendering of the offending operand (or a bare
    identifier); ``ref`` and ``state`` describe the reference at failure time
    when there is one.
    """

    def __init__(
        self,
        kind: ErrorKind,
        span: SourceSpan,
        subject: str = "",
        *,
        ref: Optional[int] = None,
        state=None,
        detail: str = "",
    ):
        super().__init__(f"{kind.value}: {subject}")
        self.kind = kind
        self.span = span
        self.subject = subject
        self.ref = ref
        self.state = state
        self.detail = detail
