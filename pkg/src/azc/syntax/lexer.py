"""Tokenizer for ``.azc`` source text."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Union

from azc.syntax.ast import SourceSpan


class LexError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span


class Tok(enum.Enum):
    IDENT = "identifier"
    INT = "integer"
    QUAL = "qualifier"
    OP_ALIAS = "&-"
    OP_COPY = ":="
    OP_MOVE = "<-"
    ARROW = "->"
    EQEQ = "=="
    PLUS = "+"
    MINUS = "-"
    STAR = "*"
    GT = ">"
    LPAREN = "("
    RPAREN = ")"
    LBRACE = "{"
    RBRACE = "}"
    COMMA = ","
    COLON = ":"
    SEMI = ";"
    DOT = "."
    NEWLINE = "newline"
    EOF = "end of input"
    # keywords
    LET = "let"
    FUN = "fun"
    NEW = "new"
    RETURN = "return"
    IF = "if"
    ELSE = "else"
    TRUE = "true"
    FALSE = "false"
    REC = "rec"
    NOT = "not"
    STATE = "state"
    PRINT = "print"


KEYWORDS = {
    t.value: t
    for t in (
        Tok.LET, Tok.FUN, Tok.NEW, Tok.RETURN, Tok.IF, Tok.ELSE, Tok.TRUE,
        Tok.FALSE, Tok.REC, Tok.NOT, Tok.STATE, Tok.PRINT,
    )
}

QUALIFIER_WORDS = {"cst", "mut", "own", "brw"}

# Longest match first.
PUNCTUATION = [
    ("&-", Tok.OP_ALIAS),
    (":=", Tok.OP_COPY),
    ("<-", Tok.OP_MOVE),
    ("->", Tok.ARROW),
    ("==", Tok.EQEQ),
    ("+", Tok.PLUS),
    ("-", Tok.MINUS),
    ("*", Tok.STAR),
    (">", Tok.GT),
    ("(", Tok.LPAREN),
    (")", Tok.RPAREN),
    ("{", Tok.LBRACE),
    ("}", Tok.RBRACE),
    (",", Tok.COMMA),
    (":", Tok.COLON),
    (";", Tok.SEMI),
    (".", Tok.DOT),
]


@dataclass(frozen=True)
class Token:
    kind: Tok
    value: Union[str, int, None]
    span: SourceSpan

    def __repr__(self) -> str:
        if self.value is None:
            return f"Token({self.kind.name})"
        return f"Token({self.kind.name}, {self.value!r})"


def _is_ident_start(ch: str) -> bool:
    return ch == "_" or ("a" <= ch <= "z") or ("A" <= ch <= "Z")


def _is_ident_char(ch: str) -> bool:
    return _is_ident_start(ch) or ch.isdigit() and ch.isascii()


def tokenize(source: str) -> List[Token]:
    """Split ``source`` into tokens; the list always ends with ``EOF``.

    Newlines are kept as tokens (consecutive ones collapse) because they act
    as sequence separators.  ``//`` starts a comment running to end of line.
    """
    tokens: List[Token] = []
    i = 0
    line = 1
    line_start = 0
    n = len(source)

    def span(start: int, end: int) -> SourceSpan:
        return SourceSpan(start, end, line, start - line_start + 1)

    while i < n:
        ch = source[i]
        if ch == "\n":
            if not tokens or tokens[-1].kind is not Tok.NEWLINE:
                tokens.append(Token(Tok.NEWLINE, None, span(i, i + 1)))
            i += 1
            line += 1
            line_start = i
            continue
        if ch in " \t\r":
            i += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch.isascii() and ch.isdigit():
            j = i
            while j < n and source[j].isascii() and source[j].isdigit():
                j += 1
            tokens.append(Token(Tok.INT, int(source[i:j]), span(i, j)))
            i = j
            continue
        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident_char(source[j]):
                j += 1
            word = source[i:j]
            kind = KEYWORDS.get(word, Tok.IDENT)
            tokens.append(Token(kind, word if kind is Tok.IDENT else None, span(i, j)))
            i = j
            continue
        if ch == "@":
            j = i + 1
            while j < n and _is_ident_char(source[j]):
                j += 1
            word = source[i + 1:j]
            if word not in QUALIFIER_WORDS:
                raise LexError(f"unknown qualifier '@{word}'", span(i, j))
            tokens.append(Token(Tok.QUAL, word, span(i, j)))
            i = j
            continue
        for text, kind in PUNCTUATION:
            if source.startswith(text, i):
                tokens.append(Token(kind, None, span(i, i + len(text))))
                i += len(text)
                break
        else:
            raise LexError(f"unexpected character {ch!r}", span(i, i + 1))
    tokens.append(Token(Tok.EOF, None, span(n, n)))
    return tokens
