"""Tokenizer for `.mml` source text.

Newlines are ordinary whitespace; block items are separated by `;`.
Identifiers wrapped in backticks may contain spaces and are valid only
where member names are expected (the parser enforces placement).
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic, SourceSpan, error

KEYWORDS = {
    "let", "rec", "in", "fun", "if", "then", "else", "async", "return",
    "for", "do", "type", "true", "false", "unbox", "try", "with",
}

# longest-match first
_PUNCT = [
    "[|", "|]", "|>", "->", "<-", "<=", ">=", "<>", "&&", "||",
    "+.", "-.", "*.", "/.",
    "(", ")", "[", "]", "{", "}", ",", ";", ".", "=", "<", ">",
    "+", "-", "*", "/", "%",
]


@dataclass(frozen=True)
class Token:
    kind: str  # ident backtick int float string punct keyword letbang eof
    text: str
    value: object
    span: SourceSpan


class LexError(Exception):
    def __init__(self, diagnostic: Diagnostic) -> None:
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}


def tokenize(text: str) -> list[Token]:
    """Tokenize; raises LexError with a `parse.*` diagnostic on bad input."""
    # byte offset of each character position (plus one-past-end)
    byte_at = [0] * (len(text) + 1)
    off = 0
    for i, ch in enumerate(text):
        byte_at[i] = off
        off += len(ch.encode("utf-8"))
    byte_at[len(text)] = off

    def span(i: int, j: int) -> SourceSpan:
        return SourceSpan(byte_at[i], byte_at[j])

    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch == "/" and text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            if word == "let" and j < n and text[j] == "!":
                tokens.append(Token("letbang", "let!", None, span(i, j + 1)))
                i = j + 1
                continue
            kind = "keyword" if word in KEYWORDS else "ident"
            value: object = word
            if word == "true":
                kind, value = "keyword", True
            elif word == "false":
                kind, value = "keyword", False
            tokens.append(Token(kind, word, value, span(i, j)))
            i = j
            continue
        if ch == "`":
            j = i + 1
            while j < n and text[j] not in "`\n":
                j += 1
            if j >= n or text[j] != "`":
                raise LexError(
                    error("parse.unexpected", "unterminated backtick identifier", span(i, min(j, n)))
                )
            tokens.append(Token("backtick", text[i : j + 1], text[i + 1 : j], span(i, j + 1)))
            i = j + 1
            continue
        if ch == '"':
            j = i + 1
            buf: list[str] = []
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    break
                if text[j] == "\\":
                    if j + 1 >= n:
                        break
                    esc = text[j + 1]
                    if esc not in _ESCAPES:
                        raise LexError(
                            error("parse.unexpected", f"unknown escape \\{esc}", span(j, j + 2))
                        )
                    buf.append(_ESCAPES[esc])
                    j += 2
                    continue
                buf.append(text[j])
                j += 1
            if j >= n or text[j] != '"':
                raise LexError(
                    error("parse.unterminated-string", "string literal is not terminated", span(i, min(j, n)))
                )
            tokens.append(Token("string", text[i : j + 1], "".join(buf), span(i, j + 1)))
            i = j + 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            is_float = False
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                is_float = True
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    is_float = True
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            word = text[i:j]
            try:
                value = float(word) if is_float else int(word)
            except ValueError:
                raise LexError(error("parse.bad-number", f"bad numeric literal {word!r}", span(i, j)))
            tokens.append(Token("float" if is_float else "int", word, value, span(i, j)))
            i = j
            continue
        for punct in _PUNCT:
            if text.startswith(punct, i):
                tokens.append(Token("punct", punct, punct, span(i, i + len(punct))))
                i += len(punct)
                break
        else:
            raise LexError(error("parse.unexpected", f"unexpected character {ch!r}", span(i, i + 1)))
    tokens.append(Token("eof", "", None, span(n, n)))
    return tokens
