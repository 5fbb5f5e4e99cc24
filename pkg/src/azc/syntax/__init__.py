"""Concrete syntax: tokenizer, parser and pretty-printer."""

from azc.syntax.lexer import LexError, Token, Tok, tokenize
from azc.syntax.parser import parse_program, parse_source, parse_type_source
from azc.syntax.printer import format_term, format_type

__all__ = [
    "LexError",
    "Tok",
    "Token",
    "format_term",
    "format_type",
    "parse_program",
    "parse_source",
    "parse_type_source",
    "tokenize",
]
