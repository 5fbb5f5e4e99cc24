"""Abstract syntax of the assignment calculus: terms and type expressions.

All nodes are frozen dataclasses.  Source spans are excluded from equality so
that two trees parsed from differently formatted sources compare equal when
they have the same structure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


@dataclass(frozen=True)
class SourceSpan:
    start_offset: int
    end_offset: int
    line: int
    column: int

    def __post_init__(self) -> None:
        if self.start_offset > self.end_offset:
            raise ValueError("span start after end")
        if self.line < 1 or self.column < 1:
            raise ValueError("line and column are 1-based")

    def to(self, other: SourceSpan) -> SourceSpan:
        """Span covering ``self`` through ``other``."""
        return SourceSpan(self.start_offset, other.end_offset, self.line, self.column)


NO_SPAN = SourceSpan(0, 0, 1, 1)


def _span() -> SourceSpan:
    return field(default=NO_SPAN, compare=False, repr=False)


class AssignOp(enum.Enum):
    ALIAS = "&-"
    COPY = ":="
    MOVE = "<-"

    def __str__(self) -> str:
        return self.value


class Qualifier(enum.Enum):
    BRW = "brw"
    OWN = "own"
    CST = "cst"
    MUT = "mut"

    def __str__(self) -> str:
        return "@" + self.value


REFERENCE_QUALIFIERS = frozenset({Qualifier.BRW, Qualifier.OWN})
MUTABILITY_QUALIFIERS = frozenset({Qualifier.CST, Qualifier.MUT})

Qualifiers = frozenset  # frozenset[Qualifier]


def with_defaults(quals: frozenset) -> frozenset:
    """Fill in ``@own`` and ``@cst`` when a category is missing."""
    quals = set(quals)
    if not quals & REFERENCE_QUALIFIERS:
        quals.add(Qualifier.OWN)
    if not quals & MUTABILITY_QUALIFIERS:
        quals.add(Qualifier.CST)
    return frozenset(quals)


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class TypeExpr:
    quals: frozenset

    @property
    def is_mut(self) -> bool:
        return Qualifier.MUT in self.quals

    @property
    def is_cst(self) -> bool:
        return Qualifier.CST in self.quals


@dataclass(frozen=True)
class AtomicType(TypeExpr):
    name: str


@dataclass(frozen=True)
class FunctionType(TypeExpr):
    params: tuple  # tuple[tuple[str, TypeExpr], ...], declaration order
    codomain: TypeExpr

    @property
    def dom(self) -> dict:
        return dict(self.params)


@dataclass(frozen=True)
class StructType(TypeExpr):
    fields: tuple  # tuple[tuple[str, TypeExpr], ...]

    @property
    def field_map(self) -> dict:
        return dict(self.fields)


@dataclass(frozen=True)
class RecType(TypeExpr):
    """``rec var . body``; its qualifiers are those of ``body``."""

    var: str
    body: TypeExpr


@dataclass(frozen=True)
class RecVar(TypeExpr):
    var: str


def rec_type(var: str, body: TypeExpr) -> RecType:
    return RecType(body.quals, var, body)


# ---------------------------------------------------------------------------
# Terms

Literal = Union[int, bool]


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Atom(Term):
    value: Literal
    span: SourceSpan = _span()

    def __eq__(self, other: object) -> bool:
        # ``1 == True`` in Python; literals of different kinds are distinct.
        return (
            isinstance(other, Atom)
            and type(self.value) is type(other.value)
            and self.value == other.value
        )

    def __hash__(self) -> int:
        return hash((type(self.value), self.value))


@dataclass(frozen=True)
class Var(Term):
    name: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class FieldAccess(Term):
    target: Term
    field: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class New(Term):
    type: TypeExpr
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Let(Term):
    name: str
    type: TypeExpr
    body: Term
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Lambda(Term):
    type: FunctionType
    params: tuple  # tuple[str, ...]
    body: Term
    span: SourceSpan = _span()


@dataclass(frozen=True)
class AssignVar(Term):
    name: str
    op: AssignOp
    value: Term
    span: SourceSpan = _span()
    lhs_span: SourceSpan = _span()


@dataclass(frozen=True)
class AssignField(Term):
    target: Term
    field: str
    op: AssignOp
    value: Term
    span: SourceSpan = _span()
    lhs_span: SourceSpan = _span()


@dataclass(frozen=True)
class Arg:
    name: str
    op: AssignOp
    value: Term
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Call(Term):
    callee: Term
    args: tuple  # tuple[Arg, ...]
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Return(Term):
    op: AssignOp
    value: Term
    span: SourceSpan = _span()


@dataclass(frozen=True)
class If(Term):
    cond: Term
    then: Term
    else_: Term
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Seq(Term):
    first: Term
    second: Term
    span: SourceSpan = _span()


class ProbeKind(enum.Enum):
    STATE = "state"
    PRINT = "print"


@dataclass(frozen=True)
class Probe(Term):
    """Instrumentation: ``state(t)`` reports a typestate, ``print(t)`` a value.

    A probe evaluates to the reference of ``target`` and leaves the context
    untouched.
    """

    kind: ProbeKind
    target: Term
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Native(Term):
    """Body of a prelude function; never produced by the parser."""

    op: str
    span: SourceSpan = _span()


def children(term: Term) -> Iterator[Term]:
    """Direct sub-terms, in evaluation-independent source order."""
    if isinstance(term, FieldAccess):
        yield term.target
    elif isinstance(term, Let):
        yield term.body
    elif isinstance(term, Lambda):
        yield term.body
    elif isinstance(term, AssignVar):
        yield term.value
    elif isinstance(term, AssignField):
        yield term.target
        yield term.value
    elif isinstance(term, Call):
        yield term.callee
        for arg in term.args:
            yield arg.value
    elif isinstance(term, Return):
        yield term.value
    elif isinstance(term, If):
        yield term.cond
        yield term.then
        yield term.else_
    elif isinstance(term, Seq):
        yield term.first
        yield term.second
    elif isinstance(term, Probe):
        yield term.target


def walk(term: Term) -> Iterator[Term]:
    """Pre-order traversal of ``term`` including lambda bodies."""
    stack = [term]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(list(children(node))))


def seq_of(*terms: Term) -> Optional[Term]:
    """Right-associated sequence of ``terms``."""
    if not terms:
        return None
    result = terms[-1]
    for term in reversed(terms[:-1]):
        result = Seq(term, result)
    return result
