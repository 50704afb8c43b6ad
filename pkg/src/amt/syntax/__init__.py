"""Concrete ``.amt`` syntax: parsing and canonical printing."""

from amt.syntax.lexer import ParseError, ParseFailure, tokenize
from amt.syntax.parser import parse, parse_constraint, parse_messages
from amt.syntax.printer import format_expr, format_literal, format_message, print_model

__all__ = [
    "ParseError", "ParseFailure", "tokenize", "parse", "parse_constraint",
    "parse_messages", "format_expr", "format_literal", "format_message", "print_model",
]
