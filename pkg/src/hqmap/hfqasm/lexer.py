"""Tokenizer for HF-QASM source text."""

from __future__ import annotations

from typing import NamedTuple

KEYWORDS = {"module": "MODULE", "qubit": "QUBIT", "qbit": "QUBIT"}
PUNCTUATION = frozenset("(){}[],;*")
WHITESPACE = frozenset(" \t\r\n")
DAGGER = "†"


class Token(NamedTuple):
    kind: str  # MODULE, QUBIT, NAME, NUM, or the punctuation character itself
    value: str
    line: int
    col: int


class LexError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


def _is_letter(ch: str) -> bool:
    return ("a" <= ch <= "z") or ("A" <= ch <= "Z")


def _is_digit(ch: str) -> bool:
    return "0" <= ch <= "9"


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens, dropping whitespace and ``#`` comments.

    Names are ``[a-zA-Z][a-zA-Z0-9]*``; a trailing dagger is kept in the
    lexeme so that ``T†`` and ``S†`` survive as gate names. Numbers
    are ``0`` or ``[1-9][0-9]*`` and may not run into a letter.
    """
    tokens: list[Token] = []
    i, n = 0, len(text)
    line, col = 1, 1

    def advance(count: int) -> None:
        nonlocal i, line, col
        for _ in range(count):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in WHITESPACE:
            advance(1)
        elif ch == "#":
            j = text.find("\n", i)
            advance((n if j < 0 else j) - i)
        elif _is_letter(ch):
            j = i + 1
            while j < n and (_is_letter(text[j]) or _is_digit(text[j])):
                j += 1
            if j < n and text[j] == DAGGER:
                j += 1
            lexeme = text[i:j]
            tokens.append(Token(KEYWORDS.get(lexeme, "NAME"), lexeme, line, col))
            advance(j - i)
        elif _is_digit(ch):
            j = i + 1
            while j < n and _is_digit(text[j]):
                j += 1
            lexeme = text[i:j]
            if len(lexeme) > 1 and lexeme[0] == "0":
                raise LexError(f"number with leading zero: {lexeme!r}", line, col)
            if j < n and (_is_letter(text[j]) or text[j] == DAGGER):
                raise LexError(
                    f"number {lexeme!r} followed by a letter; names must start with a letter",
                    line,
                    col + (j - i),
                )
            tokens.append(Token("NUM", lexeme, line, col))
            advance(j - i)
        elif ch in PUNCTUATION:
            tokens.append(Token(ch, ch, line, col))
            advance(1)
        else:
            raise LexError(f"unexpected character {ch!r}", line, col)
    return tokens
