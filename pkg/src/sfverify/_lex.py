"""Small configurable tokenizer shared by the textual frontends."""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import SourceError


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident' | 'num' | 'punct' | 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str, puncts: tuple[str, ...], line_comment: tuple[str, ...] = ("#", "//")) -> list[Token]:
    # longest-first so '<=' wins over '<'
    puncts = tuple(sorted(puncts, key=len, reverse=True))
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        hit_comment = False
        for marker in line_comment:
            if text.startswith(marker, i):
                while i < n and text[i] != "\n":
                    i += 1
                hit_comment = True
                break
        if hit_comment:
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isdigit():
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
            toks.append(Token("num", text[i:j], line, col))
            col += j - i
            i = j
            continue
        matched = None
        for p in puncts:
            if text.startswith(p, i):
                matched = p
                break
        if matched is None:
            raise SourceError.at(f"unexpected character {c!r}", line, col)
        toks.append(Token("punct", matched, line, col))
        i += len(matched)
        col += len(matched)
    toks.append(Token("eof", "", line, col))
    return toks


class TokenStream:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.text == text and t.kind in ("punct", "ident")

    def eat(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Token:
        t = self.peek()
        if not self.at(text):
            raise SourceError.at(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return self.next()

    def expect_ident(self, what: str = "identifier") -> Token:
        t = self.peek()
        if t.kind != "ident":
            raise SourceError.at(f"expected {what}, found {t.text!r}", t.line, t.col)
        return self.next()
