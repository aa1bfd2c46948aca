"""Tokenizer for the accepted source language.

The language is an indentation-sensitive subset of Python 3 large enough
for CS1-style console programs: function definitions, assignments,
``if``/``while``/``for``/``try`` statements, calls, list displays and the
usual arithmetic, comparison and boolean operators.

Indentation is converted into ``indent``/``dedent`` tokens.  Tabs and
spaces may both be used for indentation but never mixed within one line's
prefix; a tab counts as 8 columns.  Raw tab characters are only legal in
indentation prefixes (use the ``\\t`` escape inside strings).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    INT = "intLiteral"
    FLOAT = "floatLiteral"
    STRING = "stringLiteral"
    OPERATOR = "operator"
    DELIMITER = "delimiter"
    NEWLINE = "newline"
    INDENT = "indent"
    DEDENT = "dedent"
    EOF = "endOfFile"


@dataclass(frozen=True, order=True)
class SourceSpan:
    """Half-open source region: 1-based lines and columns, end column exclusive."""

    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.start_line}:{self.start_col}"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan

    def __repr__(self) -> str:
        return f"Token({self.kind.value}, {self.text!r}, {self.span})"


class LexError(Exception):
    def __init__(self, span: SourceSpan, message: str):
        super().__init__(f"{span}: {message}")
        self.span = span
        self.message = message


# Words that become keyword tokens.  True/False/None are reserved as well
# but lex as identifiers and turn into literal nodes in the parser.
KEYWORDS = frozenset(
    "def return if elif else while for in try except as "
    "break continue pass and or not".split()
)
LITERAL_WORDS = frozenset({"True", "False", "None"})
RESERVED_WORDS = KEYWORDS | LITERAL_WORDS

# Longest first so that e.g. "//" wins over "/".
OPERATORS = ["==", "!=", "<=", ">=", "+=", "-=", "*=", "//", "/=", "<", ">", "=", "+", "-", "*", "/", "%"]
# "{", "}", ";" and "@" are lexed so the parser can reject them with a
# proper diagnostic instead of a bare illegal-character error.
DELIMITERS = "()[]{},:.;@"
OPENERS = "(["
CLOSERS = ")]"

STRING_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"'}

TAB_COLUMNS = 8


def decode_string(raw: str) -> str:
    """Cooked value of a raw string token (quotes included)."""
    body = raw[1:-1]
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            out.append(STRING_ESCAPES[body[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _indent_width(prefix: str, line_no: int) -> int:
    if not prefix:
        return 0
    if " " in prefix and "\t" in prefix:
        span = SourceSpan(line_no, 1, line_no, len(prefix) + 1)
        raise LexError(span, "mixed tabs and spaces in indentation")
    if prefix[0] == "\t":
        return len(prefix) * TAB_COLUMNS
    return len(prefix)


class _LineLexer:
    """Tokenizes one physical line; column arithmetic counts a tab as 8."""

    def __init__(self, line: str, line_no: int, start_index: int, start_col: int):
        self.line = line
        self.line_no = line_no
        self.i = start_index
        self.col = start_col

    def _span_from(self, col0: int) -> SourceSpan:
        return SourceSpan(self.line_no, col0, self.line_no, self.col)

    def error(self, message: str, col0: int | None = None) -> LexError:
        col = self.col if col0 is None else col0
        return LexError(SourceSpan(self.line_no, col, self.line_no, col + 1), message)

    def tokens(self):
        line = self.line
        while self.i < len(line):
            ch = line[self.i]
            if ch == " ":
                self.i += 1
                self.col += 1
                continue
            if ch == "\t":
                raise self.error("tab character outside indentation")
            if ch == "#":
                return  # comment runs to end of line
            col0 = self.col
            if ch.isdigit() or (ch == "." and self.i + 1 < len(line) and line[self.i + 1].isdigit()):
                yield self._number(col0)
                continue
            if ch.isalpha() or ch == "_":
                word = self._word()
                kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENTIFIER
                yield Token(kind, word, self._span_from(col0))
                continue
            if ch in "'\"":
                yield self._string(col0)
                continue
            op = self._operator()
            if op is not None:
                yield Token(TokenKind.OPERATOR, op, self._span_from(col0))
                continue
            if ch in DELIMITERS:
                self.i += 1
                self.col += 1
                yield Token(TokenKind.DELIMITER, ch, self._span_from(col0))
                continue
            raise self.error(f"illegal character {ch!r}")

    def _word(self) -> str:
        line = self.line
        j = self.i
        while j < len(line) and (line[j].isalnum() or line[j] == "_"):
            j += 1
        word = line[self.i : j]
        self.col += j - self.i
        self.i = j
        return word

    def _number(self, col0: int) -> Token:
        line = self.line
        j = self.i
        while j < len(line) and line[j].isdigit():
            j += 1
        is_float = False
        if j < len(line) and line[j] == ".":
            is_float = True
            j += 1
            while j < len(line) and line[j].isdigit():
                j += 1
        if j < len(line) and (line[j].isalpha() or line[j] == "_" or line[j] == "."):
            bad_col = col0 + (j - self.i)
            raise self.error("malformed number literal", bad_col)
        text = line[self.i : j]
        self.col += j - self.i
        self.i = j
        kind = TokenKind.FLOAT if is_float else TokenKind.INT
        return Token(kind, text, self._span_from(col0))

    def _string(self, col0: int) -> Token:
        line = self.line
        quote = line[self.i]
        j = self.i + 1
        while j < len(line):
            ch = line[j]
            if ch == "\\":
                if j + 1 >= len(line) or line[j + 1] not in STRING_ESCAPES:
                    raise self.error("unsupported escape sequence", col0 + (j - self.i))
                j += 2
                continue
            if ch == "\t":
                raise self.error("tab character outside indentation", col0 + (j - self.i))
            if ch == quote:
                j += 1
                text = line[self.i : j]
                self.col += j - self.i
                self.i = j
                return Token(TokenKind.STRING, text, self._span_from(col0))
            j += 1
        raise self.error("unterminated string literal", col0)

    def _operator(self) -> str | None:
        line = self.line
        for op in OPERATORS:
            if line.startswith(op, self.i):
                self.i += len(op)
                self.col += len(op)
                return op
        return None


def tokenize(source: str) -> list[Token]:
    """Tokenize ``source``; raises LexError on input outside the lexical rules.

    Guarantees on success: the stream ends with ``endOfFile``, every
    ``indent`` has a matching ``dedent``, and blank or comment-only lines
    contribute no tokens.  Newlines inside ``()`` or ``[]`` brackets are
    implicit line joins.
    """
    tokens: list[Token] = []
    indents = [0]
    depth = 0  # open bracket nesting
    last_line_no = max(1, source.count("\n") + 1)

    for line_index, line in enumerate(source.split("\n")):
        line_no = line_index + 1
        if depth == 0:
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            prefix_len = len(line) - len(line.lstrip(" \t"))
            width = _indent_width(line[:prefix_len], line_no)
            if width > indents[-1]:
                indents.append(width)
                tokens.append(
                    Token(TokenKind.INDENT, line[:prefix_len], SourceSpan(line_no, 1, line_no, width + 1))
                )
            else:
                while width < indents[-1]:
                    indents.pop()
                    tokens.append(Token(TokenKind.DEDENT, "", SourceSpan(line_no, 1, line_no, 2)))
                if width != indents[-1]:
                    raise LexError(
                        SourceSpan(line_no, 1, line_no, width + 1),
                        "unindent does not match any outer indentation level",
                    )
            lexer = _LineLexer(line, line_no, prefix_len, width + 1)
        else:
            # continuation line inside brackets: indentation is not significant
            lexer = _LineLexer(line, line_no, 0, 1)

        emitted = False
        for token in lexer.tokens():
            if token.kind is TokenKind.DELIMITER:
                if token.text in OPENERS:
                    depth += 1
                elif token.text in CLOSERS and depth > 0:
                    depth -= 1
            tokens.append(token)
            emitted = True
        if depth == 0 and emitted:
            tokens.append(Token(TokenKind.NEWLINE, "", SourceSpan(line_no, lexer.col, line_no, lexer.col + 1)))

    end = SourceSpan(last_line_no, 1, last_line_no, 2)
    while len(indents) > 1:
        indents.pop()
        tokens.append(Token(TokenKind.DEDENT, "", end))
    tokens.append(Token(TokenKind.EOF, "", end))
    return tokens


def line_col_to_index(source: str, line: int, col: int) -> int:
    """Map a 1-based (line, col) position to an index into ``source``.

    Inverse of the lexer's column arithmetic (a tab advances 8 columns).
    """
    lines = source.split("\n")
    index = sum(len(lines[i]) + 1 for i in range(line - 1))
    cur = 1
    for offset, ch in enumerate(lines[line - 1]):
        if cur >= col:
            return index + offset
        cur += TAB_COLUMNS if ch == "\t" else 1
    return index + len(lines[line - 1])


def source_slice(source: str, span: SourceSpan) -> str:
    """Exact source text addressed by ``span``."""
    start = line_col_to_index(source, span.start_line, span.start_col)
    end = line_col_to_index(source, span.end_line, span.end_col)
    return source[start:end]
