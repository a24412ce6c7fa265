"""Tokenizer for the supported Java subset.

Comments are collected separately from the token stream so the parser only
sees code tokens; their spans stay available for element extraction and for
the leaf-tiling round trip.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import CommentInfo

KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while var true false null
    """.split()
)

MODIFIERS = frozenset(
    "public private protected static final abstract native strictfp synchronized transient volatile".split()
)

PRIMITIVES = frozenset("boolean byte char short int long float double void var".split())

# Longest first so that e.g. ">>=" wins over ">>" and ">".
_OPERATORS = [
    ">>>=", "<<=", ">>=", ">>>",
    "...", "->", "::",
    "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
    "+", "-", "*", "/", "%", "=", "<", ">", "!", "~", "&", "|", "^", "?", ":",
    "(", ")", "{", "}", "[", "]", ";", ",", ".", "@",
]


@dataclass
class Token:
    kind: str  # ident | num | str | char | punct | eof
    text: str
    start: int
    end: int
    line: int
    col: int

    def is_kw(self, word: str) -> bool:
        return self.kind == "ident" and self.text == word


def _ident_start(ch: str) -> bool:
    return ch.isalpha() or ch in "_$"


def _ident_part(ch: str) -> bool:
    return ch.isalnum() or ch in "_$"


def tokenize(text: str) -> tuple[list[Token], list[CommentInfo]]:
    tokens: list[Token] = []
    comments: list[CommentInfo] = []
    i = 0
    line = 1
    line_start = 0
    n = len(text)

    def col(pos: int) -> int:
        return pos - line_start + 1

    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            line_start = i
            continue
        if ch.isspace():
            i += 1
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "/":
            j = text.find("\n", i)
            if j == -1:
                j = n
            raw = text[i:j]
            comments.append(
                CommentInfo(raw[2:].strip(), raw, i, j, line, line, block=False)
            )
            i = j
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "*":
            j = text.find("*/", i + 2)
            end = n if j == -1 else j + 2
            raw = text[i:end]
            start_line = line
            newlines = raw.count("\n")
            body = raw[2:-2] if raw.endswith("*/") else raw[2:]
            # Strip leading decoration stars from javadoc-style lines.
            stripped = " ".join(
                part.strip().lstrip("*").strip() for part in body.splitlines()
            ).strip()
            comments.append(
                CommentInfo(stripped, raw, i, end, start_line, start_line + newlines, block=True)
            )
            line += newlines
            if newlines:
                line_start = i + raw.rfind("\n") + 1
            i = end
            continue
        if _ident_start(ch):
            j = i + 1
            while j < n and _ident_part(text[j]):
                j += 1
            tokens.append(Token("ident", text[i:j], i, j, line, col(i)))
            i = j
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            if text.startswith(("0x", "0X"), i):
                j = i + 2
                while j < n and (text[j] in "0123456789abcdefABCDEF_"):
                    j += 1
            else:
                while j < n and (text[j].isdigit() or text[j] == "_"):
                    j += 1
                if j < n and text[j] == ".":
                    j += 1
                    while j < n and (text[j].isdigit() or text[j] == "_"):
                        j += 1
                if j < n and text[j] in "eE":
                    k = j + 1
                    if k < n and text[k] in "+-":
                        k += 1
                    if k < n and text[k].isdigit():
                        j = k
                        while j < n and text[j].isdigit():
                            j += 1
            if j < n and text[j] in "lLfFdD":
                j += 1
            tokens.append(Token("num", text[i:j], i, j, line, col(i)))
            i = j
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    j += 2
                    continue
                if text[j] == "\n":
                    break  # unterminated on this line; close it here
                j += 1
            end = min(j + 1, n) if j < n and text[j] == '"' else j
            tokens.append(Token("str", text[i:end], i, end, line, col(i)))
            i = end
            continue
        if ch == "'":
            j = i + 1
            while j < n and text[j] != "'":
                if text[j] == "\\" and j + 1 < n:
                    j += 2
                    continue
                if text[j] == "\n":
                    break
                j += 1
            end = min(j + 1, n) if j < n and text[j] == "'" else j
            tokens.append(Token("char", text[i:end], i, end, line, col(i)))
            i = end
            continue
        for op in _OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token("punct", op, i, i + len(op), line, col(i)))
                i += len(op)
                break
        else:
            # Unknown byte: emit as punct so spans stay covered.
            tokens.append(Token("punct", ch, i, i + 1, line, col(i)))
            i += 1

    tokens.append(Token("eof", "", n, n, line, col(n)))
    return tokens, comments


_STR_ESCAPES = {
    "n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f",
    "'": "'", '"': '"', "\\": "\\", "0": "\0",
}


def unescape_string(raw: str) -> str:
    """Decode a quoted Java string literal token to its value."""
    body = raw
    if body.startswith('"'):
        body = body[1:]
    if body.endswith('"'):
        body = body[:-1]
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            if nxt == "u" and i + 5 < len(body):
                try:
                    out.append(chr(int(body[i + 2 : i + 6], 16)))
                    i += 6
                    continue
                except ValueError:
                    pass
            out.append(_STR_ESCAPES.get(nxt, nxt))
            i += 2
            continue
        out.append(ch)
        i += 1
    return "".join(out)
