"""Tokenizer for the specification language.

A dot glued between identifier characters produces a single dotted
identifier token (``s.value``, ``init.pre``); a free-standing dot is the
quantifier separator.  Numbers may carry a ``%`` suffix, which scales the
literal by 1/100.
"""

from __future__ import annotations

from dataclasses import dataclass
from .errors import ParseError


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT NUMBER STRING PUNCT EOF
    value: str
    line: int
    col: int
    number: float = 0.0

    def __repr__(self) -> str:  # compact in parser error paths
        return f"{self.kind}({self.value!r})@{self.line}:{self.col}"


PUNCT = (
    "&&",
    "||",
    "->",
    "!=",
    "<=",
    ">=",
    "!",
    "=",
    "<",
    ">",
    "(",
    ")",
    "{",
    "}",
    ",",
    ":",
    ".",
    "-",
)

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                advance(1)
            continue
        start_line, start_col = line, col
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise ParseError("unterminated string literal", start_line, start_col)
                j += 1
            if j >= n:
                raise ParseError("unterminated string literal", start_line, start_col)
            value = text[i + 1 : j]
            advance(j - i + 1)
            tokens.append(Token("STRING", value, start_line, start_col))
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            raw = text[i:j]
            number = float(raw)
            if j < n and text[j] == "%":
                number /= 100.0
                j += 1
                raw = text[i:j]
            advance(j - i)
            tokens.append(Token("NUMBER", raw, start_line, start_col, number=number))
            continue
        if ch in _IDENT_START:
            j = i
            while j < n and text[j] in _IDENT_CONT:
                j += 1
            # glue dotted segments: ident '.' ident with no whitespace
            while j + 1 < n and text[j] == "." and text[j + 1] in _IDENT_START:
                j += 1
                while j < n and text[j] in _IDENT_CONT:
                    j += 1
            value = text[i:j]
            advance(j - i)
            tokens.append(Token("IDENT", value, start_line, start_col))
            continue
        for p in PUNCT:
            if text.startswith(p, i):
                advance(len(p))
                tokens.append(Token("PUNCT", p, start_line, start_col))
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", start_line, start_col)
    tokens.append(Token("EOF", "", line, col))
    return tokens
