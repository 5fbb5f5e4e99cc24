"""Deterministic pretty-printer; output re-parses to an equal tree."""

from __future__ import annotations

from azc.syntax import operators
from azc.syntax.ast import (
    AssignField,
    AssignOp,
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
)

INDENT = "  "

# Precedence levels, loosest first.
SEQ, STMT, CMP, ADD, MUL, UNARY, POSTFIX = range(7)


def format_qualifiers(quals: frozenset) -> str:
    """``@own`` is the default and is left implicit; mutability is always shown."""
    prefix = ""
    if Qualifier.BRW in quals:
        prefix += "@brw "
        if Qualifier.OWN in quals:
            prefix += "@own "
    if Qualifier.MUT in quals:
        prefix += "@mut "
    if Qualifier.CST in quals:
        prefix += "@cst "
    return prefix


def format_type(ty: TypeExpr) -> str:
    if isinstance(ty, RecType):
        return f"rec {ty.var} . {format_type(ty.body)}"
    prefix = format_qualifiers(ty.quals)
    if isinstance(ty, (AtomicType, RecVar)):
        name = ty.name if isinstance(ty, AtomicType) else ty.var
        return prefix + name
    if isinstance(ty, FunctionType):
        params = ", ".join(f"{n}: {format_type(t)}" for n, t in ty.params)
        return f"{prefix}fun({params}) -> {format_type(ty.codomain)}"
    if isinstance(ty, StructType):
        fields = ", ".join(f"{n}: {format_type(t)}" for n, t in ty.fields)
        return prefix + "{" + fields + "}"
    raise TypeError(f"not a type: {ty!r}")


def format_term(term: Term) -> str:
    return _Printer().fmt(term, SEQ, 0, block=True)


class _Printer:
    def fmt(self, term: Term, level: int, depth: int, block: bool = False) -> str:
        own = self.level_of(term)
        if own < level:
            return "(" + self.fmt(term, SEQ, depth, block=False) + ")"
        return self.render(term, depth, block)

    def level_of(self, term: Term) -> int:
        if isinstance(term, Seq):
            return SEQ
        if isinstance(term, (AssignVar, AssignField, Return)):
            return STMT
        if isinstance(term, Call) and isinstance(term.callee, Var):
            name = term.callee.name
            args = {a.name: a for a in term.args}
            if name in operators.BINARY_BY_NAME and _is_sugar(args, ("lhs", "rhs")):
                return operators.BINARY_BY_NAME[name][1]
            if name == operators.NOT and _is_sugar(args, ("operand",)):
                return UNARY
        if isinstance(term, Atom) and not isinstance(term.value, bool) and term.value < 0:
            return UNARY
        return POSTFIX

    def block(self, term: Term, depth: int) -> str:
        inner = INDENT * (depth + 1)
        body = self.fmt(term, SEQ, depth + 1, block=True)
        return "{\n" + inner + body + "\n" + INDENT * depth + "}"

    def render(self, term: Term, depth: int, block: bool) -> str:
        if isinstance(term, Seq):
            sep = "\n" + INDENT * depth if block else "; "
            return self.fmt(term.first, STMT, depth) + sep + self.fmt(term.second, SEQ, depth, block)
        if isinstance(term, Atom):
            if isinstance(term.value, bool):
                return "true" if term.value else "false"
            return str(term.value)
        if isinstance(term, Var):
            return term.name
        if isinstance(term, FieldAccess):
            return f"{self.fmt(term.target, POSTFIX, depth)}.{term.field}"
        if isinstance(term, New):
            return f"new {format_type(term.type)}"
        if isinstance(term, Let):
            return f"let {term.name}: {format_type(term.type)} {self.block(term.body, depth)}"
        if isinstance(term, Lambda):
            ty = term.type
            params = ", ".join(f"{n}: {format_type(ty.dom[n])}" for n in term.params)
            quals = format_qualifiers(ty.quals)
            return f"{quals}fun({params}) -> {format_type(ty.codomain)} {self.block(term.body, depth)}"
        if isinstance(term, AssignVar):
            return f"{term.name} {term.op} {self.fmt(term.value, CMP, depth)}"
        if isinstance(term, AssignField):
            target = self.fmt(term.target, POSTFIX, depth)
            return f"{target}.{term.field} {term.op} {self.fmt(term.value, CMP, depth)}"
        if isinstance(term, Return):
            return f"return {term.op} {self.fmt(term.value, CMP, depth)}"
        if isinstance(term, If):
            cond = self.fmt(term.cond, CMP, depth)
            return f"if {cond} {self.block(term.then, depth)} else {self.block(term.else_, depth)}"
        if isinstance(term, Probe):
            return f"{term.kind.value}({self.fmt(term.target, CMP, depth)})"
        if isinstance(term, Native):
            return f"<native {term.op}>"
        if isinstance(term, Call):
            return self.call(term, depth)
        raise TypeError(f"not a term: {term!r}")

    def call(self, term: Call, depth: int) -> str:
        callee = term.callee
        if isinstance(callee, Var) and callee.name in operators.BINARY_BY_NAME:
            args = {a.name: a for a in term.args}
            symbol, level = operators.BINARY_BY_NAME[callee.name]
            if _is_sugar(args, ("lhs", "rhs")):
                left_level = level + 1 if level == CMP else level
                left = self.fmt(args["lhs"].value, left_level, depth)
                right = self.fmt(args["rhs"].value, level + 1, depth)
                return f"{left} {symbol} {right}"
        if isinstance(callee, Var) and callee.name == operators.NOT:
            args = {a.name: a for a in term.args}
            if _is_sugar(args, ("operand",)):
                return "not " + self.fmt(args["operand"].value, UNARY, depth)
        rendered = ", ".join(f"{a.name} {a.op} {self.fmt(a.value, CMP, depth)}" for a in term.args)
        return f"{self.fmt(callee, POSTFIX, depth)}({rendered})"


def _is_sugar(args: dict, names: tuple) -> bool:
    return tuple(args) == names and all(a.op is AssignOp.COPY for a in args.values())
