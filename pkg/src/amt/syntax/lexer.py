from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from amt.expr import SourceSpan

KEYWORDS = frozenset("""
    model class extends attr op inv statechart initial state transition on send
    objects link test fixture sd trigger observe assert oracle assoc role env self
    true false and or not implies mod
""".split())

# Longest alternatives first.
SYMBOLS = ("->", "<<", ">>", ":=", "<>", "<=", ">=", "..",
           "{", "}", "(", ")", "[", "]", ";", ":", ",", ".", "=", "<", ">",
           "+", "-", "*", "/", "|")

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<real>\d+\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<sym>""" + "|".join(re.escape(s) for s in SYMBOLS) + r""")
""", re.VERBOSE)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str  # ident | kw | int | real | string | sym | error | eof
    text: str
    value: Union[int, float, str, None]
    span: SourceSpan

    def is_(self, kind: str, text: str) -> bool:
        return self.kind == kind and self.text == text


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span

    def __eq__(self, other):
        return (isinstance(other, ParseError) and self.message == other.message
                and self.span == other.span)

    def __hash__(self):
        return hash((self.message, self.span))


class ParseFailure(Exception):
    """One or more syntax errors; ``errors`` is in source order."""

    def __init__(self, errors: list[ParseError]):
        super().__init__("\n".join(str(e) for e in errors))
        self.errors = errors


def _unescape(body: str) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            out.append(_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def tokenize(text: str, filename: str = "<input>") -> list[Token]:
    text = text.replace("\r\n", "\n")
    tokens: list[Token] = []
    pos, line, col = 0, 1, 1
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            # Left for the parser to report, so recovery still applies.
            tokens.append(Token("error", text[pos], None,
                                SourceSpan(filename, line, col, line, col)))
            pos += 1
            col += 1
            continue
        lexeme = m.group()
        kind = m.lastgroup
        nl = lexeme.count("\n")
        if nl:
            end_line, end_col = line + nl, len(lexeme) - lexeme.rfind("\n")
        else:
            end_line, end_col = line, col + len(lexeme) - 1
        if kind not in ("ws", "comment"):
            span = SourceSpan(filename, line, col, end_line, max(end_col, col))
            value: Union[int, float, str, None] = None
            if kind == "ident" and lexeme in KEYWORDS:
                kind = "kw"
            elif kind == "int":
                value = int(lexeme)
            elif kind == "real":
                value = float(lexeme)
            elif kind == "string":
                value = _unescape(lexeme[1:-1])
            tokens.append(Token(kind, lexeme, value, span))
        if nl:
            line, col = end_line, end_col
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("eof", "", None, SourceSpan(filename, line, col, line, col)))
    return tokens
