"""Lexer for the SkiQL query language.

The token stream is word-oriented: a maximal run of non-delimiter characters
must form a keyword, an identifier, or an ISO date, otherwise the whole word
is rejected at its starting column.  Keywords are case-sensitive.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum, auto

from skiql.model import SkiqlError


class TokenKind(Enum):
    ENTITY = auto()
    REL = auto()
    ANY = auto()
    UNION = auto()
    FROM = auto()
    TO = auto()
    REF = auto()
    AGGR = auto()
    SHARED = auto()
    NON_SHARED = auto()
    SPECIFIC = auto()
    KEYS = auto()
    HISTORY = auto()
    BEFORE = auto()
    AFTER = auto()
    BETWEEN = auto()
    IDENT = auto()
    DATE = auto()
    REGEX = auto()
    UNDERSCORE = auto()
    STAR = auto()
    LBRACKET = auto()
    RBRACKET = auto()
    LT = auto()
    GT = auto()
    LPAREN = auto()
    RPAREN = auto()
    COMMA = auto()
    COLON = auto()
    QUESTION = auto()
    INDIRECT = auto()
    EOF = auto()


KEYWORDS = {
    "ENTITY": TokenKind.ENTITY,
    "REL": TokenKind.REL,
    "ANY": TokenKind.ANY,
    "UNION": TokenKind.UNION,
    "FROM": TokenKind.FROM,
    "TO": TokenKind.TO,
    "REF": TokenKind.REF,
    "AGGR": TokenKind.AGGR,
    "shared": TokenKind.SHARED,
    "non-shared": TokenKind.NON_SHARED,
    "specific": TokenKind.SPECIFIC,
    "keys": TokenKind.KEYS,
    "history": TokenKind.HISTORY,
    "before": TokenKind.BEFORE,
    "after": TokenKind.AFTER,
    "between": TokenKind.BETWEEN,
}

_PUNCT = {
    "[": TokenKind.LBRACKET,
    "]": TokenKind.RBRACKET,
    "<": TokenKind.LT,
    ">": TokenKind.GT,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    ",": TokenKind.COMMA,
    ":": TokenKind.COLON,
    "*": TokenKind.STAR,
    "?": TokenKind.QUESTION,
}

_DELIMITERS = set(_PUNCT) | {'"'}
_WS = {" ", "\t", "\r", "\n"}

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_DATE_RE = re.compile(r"\d{4}-\d{2}-\d{2}\Z")


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    value: str
    line: int
    column: int

    def describe(self) -> str:
        if self.kind is TokenKind.EOF:
            return "end of query"
        return repr(self.value)


class LexError(SkiqlError):
    def __init__(self, line: int, column: int, text: str, message: str):
        super().__init__(f"[{line}:{column}] {message}")
        self.line = line
        self.column = column
        self.text = text
        self.reason = message


class _Scanner:
    def __init__(self, source: str):
        self.source = source
        self.pos = 0
        self.line = 1
        self.column = 1

    def eof(self) -> bool:
        return self.pos >= len(self.source)

    def peek(self) -> str:
        return self.source[self.pos] if self.pos < len(self.source) else ""

    def advance(self) -> str:
        ch = self.source[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return ch


def _word_error(word: str, line: int, column: int) -> LexError:
    offending = word[0]
    if word[0].isdigit():
        match = re.match(r"\d{4}-\d{2}-\d{2}", word)
        offset = match.end() if match else 0
        offending = word[offset] if offset < len(word) else word[0]
        reason = f"malformed date {word!r}"
    elif re.match(r"[A-Za-z_]", word):
        bad = re.search(r"[^A-Za-z0-9_]", word)
        offending = word[bad.start()] if bad else word[0]
        reason = f"invalid character {offending!r} in {word!r}"
    else:
        reason = f"unexpected character {offending!r}"
    return LexError(line, column, offending, reason)


def _scan_regex(scanner: _Scanner, line: int, column: int) -> Token:
    # Opening quote is current; pattern runs to the next unescaped quote.
    scanner.advance()
    parts: list[str] = []
    while not scanner.eof():
        ch = scanner.advance()
        if ch == "\\" and scanner.peek() == '"':
            parts.append(scanner.advance())
            continue
        if ch == '"':
            return Token(TokenKind.REGEX, "".join(parts), line, column)
        if ch == "\n":
            break
        parts.append(ch)
    raise LexError(line, column, 'r"', "unterminated regex literal")


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens, ending with an EOF marker."""
    scanner = _Scanner(source)
    tokens: list[Token] = []
    while not scanner.eof():
        ch = scanner.peek()
        if ch in _WS:
            scanner.advance()
            continue
        line, column = scanner.line, scanner.column
        if ch == ">":
            scanner.advance()
            if scanner.peek() == ">":
                scanner.advance()
                tokens.append(Token(TokenKind.INDIRECT, ">>", line, column))
            else:
                tokens.append(Token(TokenKind.GT, ">", line, column))
            continue
        if ch in _PUNCT:
            scanner.advance()
            tokens.append(Token(_PUNCT[ch], ch, line, column))
            continue
        if ch == '"':
            raise LexError(line, column, '"', 'stray \'"\' (regex literals are written r"...")')
        # A word: maximal run of non-delimiter, non-whitespace characters.
        parts = []
        while not scanner.eof() and scanner.peek() not in _WS and scanner.peek() not in _DELIMITERS:
            parts.append(scanner.advance())
        word = "".join(parts)
        if word == "r" and scanner.peek() == '"':
            tokens.append(_scan_regex(scanner, line, column))
            continue
        if word in KEYWORDS:
            tokens.append(Token(KEYWORDS[word], word, line, column))
        elif word == "_":
            tokens.append(Token(TokenKind.UNDERSCORE, word, line, column))
        elif _IDENT_RE.match(word):
            tokens.append(Token(TokenKind.IDENT, word, line, column))
        elif _DATE_RE.match(word):
            tokens.append(Token(TokenKind.DATE, word, line, column))
        else:
            raise _word_error(word, line, column)
    tokens.append(Token(TokenKind.EOF, "", scanner.line, scanner.column))
    return tokens
