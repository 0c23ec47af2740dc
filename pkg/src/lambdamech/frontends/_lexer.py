from __future__ import annotations

import re
from dataclasses import dataclass

from ..core import LambdaMechError


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    col_start: int
    col_end: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.col_start}"


class ParseError(LambdaMechError):
    def __init__(self, span: SourceSpan, message: str, expected=()):
        self.span = span
        self.message = message or "syntax error"
        self.expected = tuple(expected)
        text = f"{span}: {self.message}"
        if self.expected:
            text += f" (expected {', '.join(self.expected)})"
        super().__init__(text)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "number", "sym", "newline", "eof"
    text: str
    span: SourceSpan


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_NUMBER = re.compile(r"\d+")


def tokenize(text: str, symbols, file: str = "<input>", newlines: bool = False) -> list[Token]:
    """Split ``text`` into tokens; ``#`` starts a comment running to end of line."""
    symbols = sorted(symbols, key=len, reverse=True)
    out = []
    for lineno, line in enumerate(text.splitlines() or [""], start=1):
        col = 0
        while col < len(line):
            ch = line[col]
            if ch == "#":
                break
            if ch.isspace():
                col += 1
                continue
            m = _IDENT.match(line, col) or _NUMBER.match(line, col)
            if m:
                kind = "number" if m.group().isdigit() else "ident"
                out.append(Token(kind, m.group(), SourceSpan(file, lineno, col + 1, m.end() + 1)))
                col = m.end()
                continue
            for sym in symbols:
                if line.startswith(sym, col):
                    out.append(Token("sym", sym, SourceSpan(file, lineno, col + 1, col + 1 + len(sym))))
                    col += len(sym)
                    break
            else:
                raise ParseError(SourceSpan(file, lineno, col + 1, col + 2),
                                 f"unexpected character {ch!r}")
        if newlines:
            out.append(Token("newline", "", SourceSpan(file, lineno, len(line) + 1, len(line) + 1)))
    last = text.splitlines()[-1] if text.splitlines() else ""
    nlines = max(len(text.splitlines()), 1)
    out.append(Token("eof", "", SourceSpan(file, nlines, len(last) + 1, len(last) + 1)))
    return out


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos = min(self.pos + 1, len(self.tokens) - 1)
        return tok

    def at(self, text: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok.kind in ("sym", "ident") and tok.text == text

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        if self.at(text):
            return self.next()
        self.fail(f"expected {text!r}", [repr(text)])

    def expect_kind(self, kind: str, what: str | None = None) -> Token:
        if self.peek().kind == kind:
            return self.next()
        self.fail(f"expected {what or kind}", [what or kind])

    def fail(self, message: str, expected=()):
        tok = self.peek()
        found = "end of input" if tok.kind == "eof" else "end of line" if tok.kind == "newline" else repr(tok.text)
        raise ParseError(tok.span, f"{message}, found {found}", expected)
