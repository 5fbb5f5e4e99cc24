"""Recursive-descent parser producing :mod:`azc.syntax.ast` terms.

Grammar (see ``docs/grammar.md`` for the full EBNF)::

    seq     ::= stmt { sep stmt } [sep]          sep ::= ";" | NEWLINE
    stmt    ::= "return" op expr | expr [ op expr ]
    expr    ::= add [ ("==" | ">") add ]
    add     ::= mul { ("+" | "-") mul }
    mul     ::= unary { "*" unary }
    unary   ::= "not" unary | "-" INT | postfix
    postfix ::= primary { "." IDENT | "(" args ")" }

Newlines separate statements only directly inside a block or at top level;
inside parentheses and argument lists they are insignificant.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence

from azc.errors import (
    DuplicateArgumentName,
    DuplicateParameter,
    ParseError,
    ShadowingDeclaration,
)
from azc.syntax import operators
from azc.syntax.ast import (
    Arg,
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
    New,
    Probe,
    ProbeKind,
    Qualifier,
    RecType,
    RecVar,
    Return,
    Seq,
    SourceSpan,
    StructType,
    Term,
    TypeExpr,
    Var,
    with_defaults,
)
from azc.syntax.lexer import Tok, Token, tokenize

ASSIGN_OPS = {Tok.OP_ALIAS: AssignOp.ALIAS, Tok.OP_COPY: AssignOp.COPY, Tok.OP_MOVE: AssignOp.MOVE}
BINARY_TOKENS = {Tok.EQEQ: "==", Tok.GT: ">", Tok.PLUS: "+", Tok.MINUS: "-", Tok.STAR: "*"}
STMT_END = (Tok.RBRACE, Tok.RPAREN, Tok.EOF)


class Parser:
    def __init__(self, tokens: Sequence[Token], predeclared: Iterable[str] = ()):
        self.tokens = list(tokens)
        self.pos = 0
        self.newline_significant = [True]
        # One entry per lambda boundary; each holds the stack of let scopes.
        self.frames: List[List[set]] = [[set(predeclared)]]

    # -- token helpers -------------------------------------------------

    def peek(self) -> Token:
        if not self.newline_significant[-1]:
            while self.tokens[self.pos].kind is Tok.NEWLINE:
                self.pos += 1
        return self.tokens[self.pos]

    def at(self, *kinds: Tok) -> bool:
        return self.peek().kind in kinds

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind is not Tok.EOF:
            self.pos += 1
        return tok

    def skip_newlines(self) -> None:
        while self.tokens[self.pos].kind is Tok.NEWLINE:
            self.pos += 1

    def expect(self, *kinds: Tok) -> Token:
        tok = self.peek()
        if tok.kind not in kinds:
            names = " or ".join(f"'{k.value}'" for k in kinds)
            raise ParseError(
                f"expected {names}, found '{tok.kind.value}'",
                tok.span,
                frozenset(k.value for k in kinds),
            )
        return self.advance()

    def prev_span(self) -> SourceSpan:
        return self.tokens[self.pos - 1].span

    def span_from(self, start: SourceSpan) -> SourceSpan:
        return start.to(self.prev_span())

    def _nested(self, significant: bool):
        parser = self

        class _Mode:
            def __enter__(self):
                parser.newline_significant.append(significant)

            def __exit__(self, *exc):
                parser.newline_significant.pop()

        return _Mode()

    # -- scopes --------------------------------------------------------

    def declare(self, name: str, span: SourceSpan) -> None:
        for scope in self.frames[-1]:
            if name in scope:
                raise ShadowingDeclaration(f"`{name}` is already declared in an enclosing scope", span)

    # -- terms ---------------------------------------------------------

    def parse_program(self) -> Term:
        self.skip_newlines()
        term = self.parse_seq()
        self.skip_newlines()
        self.expect(Tok.EOF)
        return term

    def parse_seq(self) -> Term:
        start = self.peek().span
        first = self.parse_stmt()
        if not self.at(Tok.SEMI, Tok.NEWLINE):
            return first
        while self.at(Tok.SEMI, Tok.NEWLINE):
            self.advance()
        if self.at(*STMT_END):
            return first
        rest = self.parse_seq()
        return Seq(first, rest, self.span_from(start))

    def parse_stmt(self) -> Term:
        tok = self.peek()
        if tok.kind is Tok.RETURN:
            self.advance()
            op = self.parse_op()
            value = self.parse_expr()
            return Return(op, value, self.span_from(tok.span))
        lhs = self.parse_expr()
        if not self.at(*ASSIGN_OPS):
            return lhs
        op = self.parse_op()
        value = self.parse_expr()
        span = self.span_from(tok.span)
        if isinstance(lhs, Var):
            return AssignVar(lhs.name, op, value, span, lhs.span)
        if isinstance(lhs, FieldAccess):
            return AssignField(lhs.target, lhs.field, op, value, span, lhs.span)
        raise ParseError("invalid assignment target", lhs_span(lhs, tok.span))

    def parse_op(self) -> AssignOp:
        tok = self.expect(*ASSIGN_OPS)
        self.skip_newlines()
        return ASSIGN_OPS[tok.kind]

    def parse_expr(self) -> Term:
        start = self.peek().span
        left = self.parse_binary(3)
        if self.at(Tok.EQEQ, Tok.GT):
            symbol = BINARY_TOKENS[self.peek().kind]
            left = self._binary(symbol, left, 3, start)
            if self.at(Tok.EQEQ, Tok.GT):
                tok = self.peek()
                raise ParseError("comparison operators do not chain", tok.span)
        return left

    def parse_binary(self, level: int) -> Term:
        if level > 4:
            return self.parse_unary()
        start = self.peek().span
        left = self.parse_binary(level + 1)
        while self.at(*BINARY_TOKENS):
            symbol = BINARY_TOKENS[self.peek().kind]
            if operators.BINARY[symbol][1] != level:
                break
            left = self._binary(symbol, left, level + 1, start)
        return left

    def _binary(self, symbol: str, left: Term, right_level: int, start: SourceSpan) -> Term:
        op_tok = self.advance()
        self.skip_newlines()
        right = self.parse_binary(right_level)
        name = operators.BINARY[symbol][0]
        span = self.span_from(start)
        return Call(
            Var(name, op_tok.span),
            (Arg("lhs", AssignOp.COPY, left, left_span(left, start)), Arg("rhs", AssignOp.COPY, right)),
            span,
        )

    def parse_unary(self) -> Term:
        tok = self.peek()
        if tok.kind is Tok.NOT:
            self.advance()
            operand = self.parse_unary()
            span = self.span_from(tok.span)
            return Call(Var(operators.NOT, tok.span), (Arg("operand", AssignOp.COPY, operand),), span)
        if tok.kind is Tok.MINUS:
            self.advance()
            num = self.expect(Tok.INT)
            return Atom(-num.value, self.span_from(tok.span))
        return self.parse_postfix()

    def parse_postfix(self) -> Term:
        start = self.peek().span
        term = self.parse_primary()
        while True:
            # Only look at the very next token: a newline ends the postfix chain.
            tok = self.tokens[self.pos] if self.newline_significant[-1] else self.peek()
            if tok.kind is Tok.DOT:
                self.advance()
                name = self.expect(Tok.IDENT)
                term = FieldAccess(term, name.value, self.span_from(start))
            elif tok.kind is Tok.LPAREN:
                self.advance()
                args = self.parse_args()
                term = Call(term, args, self.span_from(start))
            else:
                return term

    def parse_args(self) -> tuple:
        args: List[Arg] = []
        seen = set()
        with self._nested(False):
            if not self.at(Tok.RPAREN):
                while True:
                    name = self.expect(Tok.IDENT)
                    if name.value in seen:
                        raise DuplicateArgumentName(f"argument `{name.value}` given more than once", name.span)
                    seen.add(name.value)
                    op = self.parse_op()
                    value = self.parse_expr()
                    args.append(Arg(name.value, op, value, self.span_from(name.span)))
                    if not self.at(Tok.COMMA):
                        break
                    self.advance()
            self.expect(Tok.RPAREN)
        return tuple(args)

    def parse_primary(self) -> Term:
        tok = self.peek()
        kind = tok.kind
        if kind is Tok.INT:
            self.advance()
            return Atom(tok.value, tok.span)
        if kind in (Tok.TRUE, Tok.FALSE):
            self.advance()
            return Atom(kind is Tok.TRUE, tok.span)
        if kind is Tok.IDENT:
            self.advance()
            return Var(tok.value, tok.span)
        if kind is Tok.LPAREN:
            self.advance()
            with self._nested(False):
                inner = self.parse_seq()
                self.expect(Tok.RPAREN)
            return inner
        if kind is Tok.NEW:
            self.advance()
            ty = self.parse_type()
            return New(ty, self.span_from(tok.span))
        if kind is Tok.LET:
            return self.parse_let()
        if kind in (Tok.FUN, Tok.QUAL):
            return self.parse_lambda()
        if kind is Tok.IF:
            return self.parse_if()
        if kind in (Tok.STATE, Tok.PRINT):
            self.advance()
            self.expect(Tok.LPAREN)
            with self._nested(False):
                target = self.parse_expr()
                self.expect(Tok.RPAREN)
            probe = ProbeKind.STATE if kind is Tok.STATE else ProbeKind.PRINT
            return Probe(probe, target, self.span_from(tok.span))
        raise ParseError(
            f"expected an expression, found '{kind.value}'",
            tok.span,
            frozenset({"expression"}),
        )

    def parse_block(self) -> Term:
        self.expect(Tok.LBRACE)
        with self._nested(True):
            self.skip_newlines()
            body = self.parse_seq()
            self.skip_newlines()
            self.expect(Tok.RBRACE)
        return body

    def parse_let(self) -> Let:
        start = self.advance().span
        name = self.expect(Tok.IDENT)
        self.expect(Tok.COLON)
        ty = self.parse_type()
        self.declare(name.value, name.span)
        self.frames[-1].append({name.value})
        try:
            body = self.parse_block()
        finally:
            self.frames[-1].pop()
        return Let(name.value, ty, body, self.span_from(start))

    def parse_lambda(self) -> Lambda:
        start = self.peek().span
        quals = self.parse_qualifiers()
        self.expect(Tok.FUN)
        params = self.parse_param_list(DuplicateParameter)
        self.expect(Tok.ARROW)
        codomain = self.parse_type()
        ty = FunctionType(with_defaults(quals), tuple(params), codomain)
        names = tuple(name for name, _ in params)
        self.frames.append([set(names)])
        try:
            body = self.parse_block()
        finally:
            self.frames.pop()
        return Lambda(ty, names, body, self.span_from(start))

    def parse_if(self) -> If:
        start = self.advance().span
        cond = self.parse_expr()
        then = self.parse_block()
        save = self.pos
        self.skip_newlines()
        if not self.at(Tok.ELSE):
            self.pos = save
            self.expect(Tok.ELSE)
        self.advance()
        else_ = self.parse_block()
        return If(cond, then, else_, self.span_from(start))

    # -- types ---------------------------------------------------------

    def parse_qualifiers(self) -> frozenset:
        quals = set()
        while self.at(Tok.QUAL):
            quals.add(Qualifier(self.advance().value))
        return frozenset(quals)

    def parse_type(self, rec_vars: frozenset = frozenset()) -> TypeExpr:
        if self.at(Tok.REC):
            self.advance()
            var = self.expect(Tok.IDENT).value
            self.expect(Tok.DOT)
            body = self.parse_type(rec_vars | {var})
            return RecType(body.quals, var, body)
        quals = with_defaults(self.parse_qualifiers())
        tok = self.peek()
        if tok.kind is Tok.IDENT:
            self.advance()
            if tok.value in rec_vars:
                return RecVar(quals, tok.value)
            return AtomicType(quals, tok.value)
        if tok.kind is Tok.FUN:
            self.advance()
            params = self.parse_param_list(DuplicateParameter, rec_vars)
            self.expect(Tok.ARROW)
            codomain = self.parse_type(rec_vars)
            return FunctionType(quals, tuple(params), codomain)
        if tok.kind is Tok.LBRACE:
            self.advance()
            with self._nested(False):
                fields = self.parse_fields(rec_vars)
                self.expect(Tok.RBRACE)
            return StructType(quals, tuple(fields))
        raise ParseError(
            f"expected a type, found '{tok.kind.value}'",
            tok.span,
            frozenset({"identifier", "fun", "{", "rec"}),
        )

    def parse_param_list(self, dup_error, rec_vars: frozenset = frozenset()) -> list:
        self.expect(Tok.LPAREN)
        params = []
        with self._nested(False):
            if not self.at(Tok.RPAREN):
                while True:
                    name = self.expect(Tok.IDENT)
                    if any(name.value == p for p, _ in params):
                        raise dup_error(f"parameter `{name.value}` declared more than once", name.span)
                    self.expect(Tok.COLON)
                    params.append((name.value, self.parse_type(rec_vars)))
                    if not self.at(Tok.COMMA):
                        break
                    self.advance()
            self.expect(Tok.RPAREN)
        return params

    def parse_fields(self, rec_vars: frozenset) -> list:
        fields = []
        if self.at(Tok.RBRACE):
            return fields
        while True:
            name = self.expect(Tok.IDENT)
            if any(name.value == f for f, _ in fields):
                raise ParseError(f"field `{name.value}` declared more than once", name.span)
            self.expect(Tok.COLON)
            fields.append((name.value, self.parse_type(rec_vars)))
            if not self.at(Tok.COMMA):
                break
            self.advance()
        return fields


def left_span(term: Term, fallback: SourceSpan) -> SourceSpan:
    return getattr(term, "span", fallback)


lhs_span = left_span


def parse_program(tokens: Sequence[Token], predeclared: Iterable[str] = ()) -> Term:
    return Parser(tokens, predeclared).parse_program()


def parse_source(source: str, predeclared: Iterable[str] = ()) -> Term:
    return parse_program(tokenize(source), predeclared)


def parse_type_source(source: str) -> TypeExpr:
    parser = Parser(tokenize(source))
    ty = parser.parse_type()
    parser.skip_newlines()
    parser.expect(Tok.EOF)
    return ty
