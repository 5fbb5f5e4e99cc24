"""Qualifiers, types, capability sets and the static typing function.

The typing function is flow-insensitive: it maps every term node to the type
it has regardless of the evaluation state.  Every declaration carries an
explicit annotation, so building it is a single syntax-directed pass.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional

from azc import errors
from azc.syntax import operators
from azc.syntax.ast import (
    MUTABILITY_QUALIFIERS,
    REFERENCE_QUALIFIERS,
    AssignField,
    AssignVar,
    Atom,
    AtomicType,
    Call,
    FieldAccess,
    FunctionType,
    If,
    Lambda,
    Let,
    Native,
    New,
    Probe,
    Qualifier,
    RecType,
    RecVar,
    Return,
    Seq,
    StructType,
    Term,
    TypeExpr,
    Var,
    walk,
)

ATOMIC_TYPE_NAMES = frozenset({"Int", "Bool"})

OWN_MUT = frozenset({Qualifier.OWN, Qualifier.MUT})
OWN_CST = frozenset({Qualifier.OWN, Qualifier.CST})

INT = AtomicType(OWN_CST, "Int")
BOOL = AtomicType(OWN_CST, "Bool")


def well_formed(quals: Iterable[Qualifier]) -> bool:
    quals = set(quals)
    return len(quals & REFERENCE_QUALIFIERS) == 1 and len(quals & MUTABILITY_QUALIFIERS) == 1


@dataclass(frozen=True)
class CapabilitySet:
    """A subset of {ro, rw} plus borrow capabilities ``b[r]``."""

    has_ro: bool = False
    has_rw: bool = False
    borrows: frozenset = frozenset()

    @property
    def empty(self) -> bool:
        return not (self.has_ro or self.has_rw or self.borrows)

    def __str__(self) -> str:
        parts = []
        if self.has_ro:
            parts.append("ro")
        if self.has_rw:
            parts.append("rw")
        parts.extend(f"b[r{r}]" for r in sorted(self.borrows))
        return "{" + ", ".join(parts) + "}"


NO_CAPS = CapabilitySet()


def initial_capabilities(ty: TypeExpr) -> CapabilitySet:
    """{rw, ro} for ``@mut`` types, {ro} otherwise."""
    if Qualifier.MUT in ty.quals:
        return CapabilitySet(has_ro=True, has_rw=True)
    return CapabilitySet(has_ro=True)


def literal_type(value) -> AtomicType:
    """Default type of a literal: a fresh value is owned and mutable."""
    return AtomicType(OWN_MUT, "Bool" if isinstance(value, bool) else "Int")


# ---------------------------------------------------------------------------
# Recursive types


def _substitute(ty: TypeExpr, var: str, binder: RecType) -> TypeExpr:
    if isinstance(ty, RecVar):
        if ty.var != var:
            return ty
        body = dataclasses.replace(binder.body, quals=ty.quals)
        return RecType(ty.quals, var, body)
    if isinstance(ty, RecType):
        if ty.var == var:
            return ty
        body = _substitute(ty.body, var, binder)
        return RecType(body.quals, ty.var, body)
    if isinstance(ty, FunctionType):
        params = tuple((n, _substitute(t, var, binder)) for n, t in ty.params)
        return FunctionType(ty.quals, params, _substitute(ty.codomain, var, binder))
    if isinstance(ty, StructType):
        fields = tuple((n, _substitute(t, var, binder)) for n, t in ty.fields)
        return StructType(ty.quals, fields)
    return ty


def unroll(ty: TypeExpr) -> TypeExpr:
    """One-step unfolding of ``rec a . t`` into ``t[a := rec a . t]``."""
    if not isinstance(ty, RecType):
        return ty
    return _substitute(ty.body, ty.var, ty)


def resolve(ty: TypeExpr) -> TypeExpr:
    """Unroll until the head is not a recursive binder."""
    seen = 0
    while isinstance(ty, RecType):
        ty = unroll(ty)
        seen += 1
        if seen > 64:
            raise ValueError("non-contractive recursive type")
    return ty


def equivalent(a: TypeExpr, b: TypeExpr) -> bool:
    """Structural equality modulo unfolding of recursive types."""
    return _equiv(a, b, set())


def _equiv(a: TypeExpr, b: TypeExpr, assumed: set) -> bool:
    key = (a, b)
    if key in assumed:
        return True
    if isinstance(a, RecType) or isinstance(b, RecType):
        assumed.add(key)
        return _equiv(unroll(a), unroll(b), assumed)
    if type(a) is not type(b) or a.quals != b.quals:
        return False
    if isinstance(a, AtomicType):
        return a.name == b.name
    if isinstance(a, RecVar):
        return a.var == b.var
    if isinstance(a, FunctionType):
        da, db = a.dom, b.dom
        return (
            da.keys() == db.keys()
            and all(_equiv(da[k], db[k], assumed) for k in da)
            and _equiv(a.codomain, b.codomain, assumed)
        )
    if isinstance(a, StructType):
        fa, fb = a.field_map, b.field_map
        return fa.keys() == fb.keys() and all(_equiv(fa[k], fb[k], assumed) for k in fa)
    return False


def function_type(ty: TypeExpr) -> Optional[FunctionType]:
    ty = resolve(ty)
    return ty if isinstance(ty, FunctionType) else None


def struct_type(ty: TypeExpr) -> Optional[StructType]:
    ty = resolve(ty)
    return ty if isinstance(ty, StructType) else None


# ---------------------------------------------------------------------------
# Prelude signatures


def _binop(result: str) -> FunctionType:
    return FunctionType(OWN_CST, (("lhs", INT), ("rhs", INT)), AtomicType(OWN_MUT, result))


PRELUDE_TYPES: Dict[str, FunctionType] = {
    "Int.+": _binop("Int"),
    "Int.-": _binop("Int"),
    "Int.*": _binop("Int"),
    "Int.==": _binop("Bool"),
    "Int.>": _binop("Bool"),
    operators.NOT: FunctionType(OWN_CST, (("operand", BOOL),), AtomicType(OWN_MUT, "Bool")),
}


# ---------------------------------------------------------------------------
# Typing function


class TypeEnv(Mapping):
    """Maps term nodes (by identity) to their flow-insensitive type."""

    def __init__(self, entries: Optional[dict] = None):
        # id -> (node, type); the node is kept so its id is never recycled.
        self._entries: dict = dict(entries or {})

    def __getitem__(self, node: Term) -> TypeExpr:
        return self._entries[id(node)][1]

    def __contains__(self, node: object) -> bool:
        return id(node) in self._entries

    def __iter__(self):
        return (node for node, _ in self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, node, default=None):
        entry = self._entries.get(id(node))
        return default if entry is None else entry[1]


def check_type(ty: TypeExpr, span=None) -> None:
    """Reject malformed qualifier sets and unknown atomic names, recursively."""
    if not well_formed(ty.quals):
        raise errors.MalformedQualifiers(
            "qualifier set must hold exactly one of @own/@brw and one of @cst/@mut", span
        )
    if isinstance(ty, AtomicType) and ty.name not in ATOMIC_TYPE_NAMES:
        raise errors.UnknownType(f"unknown type `{ty.name}`", span)
    if isinstance(ty, RecType):
        check_type(ty.body, span)
    elif isinstance(ty, FunctionType):
        for _, t in ty.params:
            check_type(t, span)
        check_type(ty.codomain, span)
    elif isinstance(ty, StructType):
        for _, t in ty.fields:
            check_type(t, span)


class _Builder:
    def __init__(self, predeclared: Mapping[str, TypeExpr]):
        self.entries: dict = {}
        # One frame per lambda body; each frame is a list of let scopes.
        self.frames: List[List[dict]] = [[dict(predeclared)]]
        self.codomains: List[Optional[TypeExpr]] = [None]

    def record(self, node: Term, ty: TypeExpr) -> TypeExpr:
        self.entries[id(node)] = (node, ty)
        return ty

    def lookup(self, var: Var) -> TypeExpr:
        for scope in reversed(self.frames[-1]):
            if var.name in scope:
                return scope[var.name]
        if var.name in PRELUDE_TYPES:
            return PRELUDE_TYPES[var.name]
        for frame in self.frames[:-1]:
            if any(var.name in scope for scope in frame):
                raise errors.CapturedVariable(
                    f"`{var.name}` is declared outside the function; functions do not capture", var.span
                )
        raise errors.UnknownVariable(f"`{var.name}` is not declared", var.span)

    def field(self, target_ty: TypeExpr, name: str, span) -> TypeExpr:
        struct = struct_type(target_ty)
        if struct is None or name not in struct.field_map:
            raise errors.UnknownField(f"no field `{name}` in type", span)
        return struct.field_map[name]

    def visit(self, term: Term) -> TypeExpr:
        if isinstance(term, Atom):
            return self.record(term, literal_type(term.value))
        if isinstance(term, Var):
            return self.record(term, self.lookup(term))
        if isinstance(term, FieldAccess):
            target = self.visit(term.target)
            return self.record(term, self.field(target, term.field, term.span))
        if isinstance(term, New):
            check_type(term.type, term.span)
            if struct_type(term.type) is None:
                raise errors.NotAStructType("`new` needs a structure type", term.span)
            return self.record(term, term.type)
        if isinstance(term, Let):
            check_type(term.type, term.span)
            self.record(term, term.type)
            self.frames[-1].append({term.name: term.type})
            try:
                return self.visit(term.body)
            finally:
                self.frames[-1].pop()
        if isinstance(term, Lambda):
            check_type(term.type, term.span)
            self.record(term, term.type)
            self.frames.append([dict(term.type.params)])
            self.codomains.append(term.type.codomain)
            try:
                self.visit(term.body)
            finally:
                self.frames.pop()
                self.codomains.pop()
            return term.type
        if isinstance(term, AssignVar):
            self.visit(term.value)
            return self.record(term, self.lookup(Var(term.name, term.lhs_span)))
        if isinstance(term, AssignField):
            self.visit(term.value)
            target = self.visit(term.target)
            return self.record(term, self.field(target, term.field, term.lhs_span))
        if isinstance(term, Call):
            callee = self.visit(term.callee)
            fn = function_type(callee)
            if fn is None:
                raise errors.NotAFunctionType("callee does not have a function type", term.callee.span)
            for arg in term.args:
                self.visit(arg.value)
            return self.record(term, fn.codomain)
        if isinstance(term, Return):
            self.visit(term.value)
            codomain = self.codomains[-1]
            # Outside any function the return target does not exist; the
            # evaluator reports that when the statement runs.
            return codomain if codomain is None else self.record(term, codomain)
        if isinstance(term, If):
            self.visit(term.cond)
            then = self.visit(term.then)
            self.visit(term.else_)
            return self.record(term, then)
        if isinstance(term, Seq):
            self.visit(term.first)
            return self.record(term, self.visit(term.second))
        if isinstance(term, Probe):
            return self.record(term, self.visit(term.target))
        if isinstance(term, Native):
            raise TypeError("native bodies are not user terms")
        raise TypeError(f"not a term: {term!r}")


def build_type_env(program: Term, predeclared: Optional[Mapping[str, TypeExpr]] = None) -> TypeEnv:
    """Type every node of ``program``.

    Let and lambda nodes are mapped to their annotation; assignment and
    return nodes to the type of their left operand.  ``predeclared`` gives
    the types of names bound before ``program`` runs.
    """
    predeclared = dict(predeclared or {})
    for name, ty in predeclared.items():
        check_type(ty)
    builder = _Builder(predeclared)
    builder.visit(program)
    return TypeEnv(builder.entries)


def check_arity_and_names(program: Term, env: TypeEnv) -> List[errors.StaticError]:
    """Every call must name each declared parameter exactly once."""
    diagnostics: List[errors.StaticError] = []
    for node in walk(program):
        if not isinstance(node, Call):
            continue
        fn = function_type(env[node.callee])
        declared = [name for name, _ in fn.params]
        given = {arg.name for arg in node.args}
        for arg in node.args:
            if arg.name not in fn.dom:
                diagnostics.append(
                    errors.UnknownParameterName(f"function has no parameter `{arg.name}`", arg.span)
                )
        for name in declared:
            if name not in given:
                diagnostics.append(errors.MissingArgument(f"missing argument `{name}`", node.span))
    return diagnostics
