"""Recursive-descent parser producing a span-annotated tree.

Accepted statements: function definitions with positional parameters,
single-target assignment and augmented assignment, expression statements,
``if``/``elif``/``else``, ``while``, ``for``-in, ``try`` with one or more
``except`` clauses, ``return``, ``break``, ``continue`` and ``pass``.
Suites are always indented blocks; a program holds at least one statement.

Comparisons are non-chained, the only method call is ``.append`` and call
targets must be simple names.  ``break``/``continue`` outside a loop and
``return`` outside a function are rejected at parse time.  The first error
wins; there is no recovery.
"""

from __future__ import annotations

from .lexer import SourceSpan, Token, TokenKind, decode_string, tokenize
from . import tree as t


class ParseError(Exception):
    def __init__(self, span: SourceSpan, expected: str, found: str):
        super().__init__(f"{span}: expected {expected}, found {found}")
        self.span = span
        self.expected = expected
        self.found = found


AUG_OPS = {"+=", "-=", "*=", "/="}
COMPARE_OPS = {"==", "!=", "<", "<=", ">", ">="}
ADD_OPS = {"+", "-"}
MUL_OPS = {"*", "/", "//", "%"}


def _describe(token: Token) -> str:
    if token.kind in (TokenKind.NEWLINE, TokenKind.INDENT, TokenKind.DEDENT, TokenKind.EOF):
        return token.kind.value
    return repr(token.text)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.loop_depth = 0
        self.func_depth = 0

    # --- token plumbing ---------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind is not TokenKind.EOF:
            self.pos += 1
        return token

    def at(self, kind: TokenKind, text: str | None = None) -> bool:
        token = self.peek()
        return token.kind is kind and (text is None or token.text == text)

    def expect(self, kind: TokenKind, text: str | None = None, expected: str | None = None) -> Token:
        if not self.at(kind, text):
            what = expected or (repr(text) if text is not None else kind.value)
            raise ParseError(self.peek().span, what, _describe(self.peek()))
        return self.advance()

    def fail(self, expected: str) -> ParseError:
        return ParseError(self.peek().span, expected, _describe(self.peek()))

    # --- program ----------------------------------------------------------

    def parse_program(self) -> t.Program:
        body = []
        while not self.at(TokenKind.EOF):
            body.append(self.statement())
        if not body:
            raise self.fail("a statement")
        span = SourceSpan(
            body[0].span.start_line, body[0].span.start_col,
            body[-1].span.end_line, body[-1].span.end_col,
        )
        return t.Program(span, body)

    # --- statements -------------------------------------------------------

    def statement(self) -> t.Stmt:
        token = self.peek()
        if token.kind is TokenKind.KEYWORD:
            handler = {
                "def": self.func_def,
                "if": self.if_stmt,
                "while": self.while_stmt,
                "for": self.for_stmt,
                "try": self.try_stmt,
                "return": self.return_stmt,
                "break": self.break_stmt,
                "continue": self.continue_stmt,
                "pass": self.pass_stmt,
            }.get(token.text)
            if handler is None:
                raise self.fail("a statement")
            return handler()
        return self.simple_stmt()

    def simple_stmt(self) -> t.Stmt:
        expr = self.expression()
        if self.at(TokenKind.OPERATOR, "="):
            self._check_target(expr)
            self.advance()
            value = self.expression()
            self.expect(TokenKind.NEWLINE)
            return t.Assign(self._span(expr.span, value.span), expr, value)
        if self.peek().kind is TokenKind.OPERATOR and self.peek().text in AUG_OPS:
            self._check_target(expr)
            op = self.advance().text[0]
            value = self.expression()
            self.expect(TokenKind.NEWLINE)
            return t.AugAssign(self._span(expr.span, value.span), expr, op, value)
        self.expect(TokenKind.NEWLINE)
        return t.ExprStmt(expr.span, expr)

    def _check_target(self, expr: t.Expr) -> None:
        if not isinstance(expr, (t.Name, t.Subscript)):
            raise ParseError(expr.span, "a name or subscript assignment target", "an expression")

    def func_def(self) -> t.FuncDef:
        start = self.advance().span
        name = self.expect(TokenKind.IDENTIFIER, expected="function name")
        self.expect(TokenKind.DELIMITER, "(")
        params: list[t.Name] = []
        if not self.at(TokenKind.DELIMITER, ")"):
            while True:
                p = self.expect(TokenKind.IDENTIFIER, expected="parameter name")
                params.append(t.Name(p.span, p.text))
                if self.at(TokenKind.DELIMITER, ","):
                    self.advance()
                else:
                    break
        self.expect(TokenKind.DELIMITER, ")")
        self.func_depth += 1
        outer_loops = self.loop_depth
        self.loop_depth = 0
        body = self.suite()
        self.loop_depth = outer_loops
        self.func_depth -= 1
        return t.FuncDef(self._span(start, body[-1].span), name.text, params, body)

    def if_stmt(self) -> t.If:
        start = self.advance().span
        cond = self.expression()
        body = self.suite()
        end = body[-1].span
        elifs: list[t.ElifClause] = []
        while self.at(TokenKind.KEYWORD, "elif"):
            clause_start = self.advance().span
            clause_cond = self.expression()
            clause_body = self.suite()
            end = clause_body[-1].span
            elifs.append(t.ElifClause(self._span(clause_start, end), clause_cond, clause_body))
        orelse: list[t.Stmt] | None = None
        if self.at(TokenKind.KEYWORD, "else"):
            self.advance()
            orelse = self.suite()
            end = orelse[-1].span
        return t.If(self._span(start, end), cond, body, elifs, orelse)

    def while_stmt(self) -> t.While:
        start = self.advance().span
        cond = self.expression()
        self.loop_depth += 1
        body = self.suite()
        self.loop_depth -= 1
        return t.While(self._span(start, body[-1].span), cond, body)

    def for_stmt(self) -> t.For:
        start = self.advance().span
        target_token = self.expect(TokenKind.IDENTIFIER, expected="loop variable name")
        target = t.Name(target_token.span, target_token.text)
        self.expect(TokenKind.KEYWORD, "in")
        iterable = self.expression()
        self.loop_depth += 1
        body = self.suite()
        self.loop_depth -= 1
        return t.For(self._span(start, body[-1].span), target, iterable, body)

    def try_stmt(self) -> t.Try:
        start = self.advance().span
        body = self.suite()
        handlers: list[t.Handler] = []
        while self.at(TokenKind.KEYWORD, "except"):
            handlers.append(self.handler())
        if not handlers:
            raise self.fail("'except'")
        return t.Try(self._span(start, handlers[-1].span), body, handlers)

    def handler(self) -> t.Handler:
        start = self.advance().span
        names: list[str] = []
        bound: t.Name | None = None
        if self.at(TokenKind.IDENTIFIER):
            names.append(self.advance().text)
            if self.at(TokenKind.KEYWORD, "as"):
                self.advance()
                bound_token = self.expect(TokenKind.IDENTIFIER, expected="binding name")
                bound = t.Name(bound_token.span, bound_token.text)
        elif self.at(TokenKind.DELIMITER, "("):
            self.advance()
            names.append(self.expect(TokenKind.IDENTIFIER, expected="exception name").text)
            while self.at(TokenKind.DELIMITER, ","):
                self.advance()
                names.append(self.expect(TokenKind.IDENTIFIER, expected="exception name").text)
            self.expect(TokenKind.DELIMITER, ")")
        body = self.suite()
        return t.Handler(self._span(start, body[-1].span), names, bound, body)

    def return_stmt(self) -> t.Return:
        if self.func_depth == 0:
            raise ParseError(self.peek().span, "'return' inside a function", "'return' at top level")
        start = self.advance().span
        if self.at(TokenKind.NEWLINE):
            self.advance()
            return t.Return(start, None)
        value = self.expression()
        self.expect(TokenKind.NEWLINE)
        return t.Return(self._span(start, value.span), value)

    def break_stmt(self) -> t.Break:
        if self.loop_depth == 0:
            raise ParseError(self.peek().span, "'break' inside a loop", "'break' outside any loop")
        span = self.advance().span
        self.expect(TokenKind.NEWLINE)
        return t.Break(span)

    def continue_stmt(self) -> t.Continue:
        if self.loop_depth == 0:
            raise ParseError(self.peek().span, "'continue' inside a loop", "'continue' outside any loop")
        span = self.advance().span
        self.expect(TokenKind.NEWLINE)
        return t.Continue(span)

    def pass_stmt(self) -> t.Pass:
        span = self.advance().span
        self.expect(TokenKind.NEWLINE)
        return t.Pass(span)

    def suite(self) -> list[t.Stmt]:
        self.expect(TokenKind.DELIMITER, ":")
        self.expect(TokenKind.NEWLINE, expected="newline after ':'")
        self.expect(TokenKind.INDENT, expected="an indented block")
        body = [self.statement()]
        while not self.at(TokenKind.DEDENT):
            body.append(self.statement())
        self.advance()  # dedent
        return body

    # --- expressions ------------------------------------------------------

    def expression(self) -> t.Expr:
        return self.or_expr()

    def or_expr(self) -> t.Expr:
        left = self.and_expr()
        while self.at(TokenKind.KEYWORD, "or"):
            self.advance()
            right = self.and_expr()
            left = t.BoolOp(self._span(left.span, right.span), left, "or", right)
        return left

    def and_expr(self) -> t.Expr:
        left = self.not_expr()
        while self.at(TokenKind.KEYWORD, "and"):
            self.advance()
            right = self.not_expr()
            left = t.BoolOp(self._span(left.span, right.span), left, "and", right)
        return left

    def not_expr(self) -> t.Expr:
        if self.at(TokenKind.KEYWORD, "not"):
            start = self.advance().span
            operand = self.not_expr()
            return t.UnaryOp(self._span(start, operand.span), "not", operand)
        return self.comparison()

    def comparison(self) -> t.Expr:
        left = self.arith()
        if self.peek().kind is TokenKind.OPERATOR and self.peek().text in COMPARE_OPS:
            op = self.advance().text
            right = self.arith()
            if self.peek().kind is TokenKind.OPERATOR and self.peek().text in COMPARE_OPS:
                raise ParseError(self.peek().span, "a single comparison", "a chained comparison")
            return t.Compare(self._span(left.span, right.span), left, op, right)
        return left

    def arith(self) -> t.Expr:
        left = self.term()
        while self.peek().kind is TokenKind.OPERATOR and self.peek().text in ADD_OPS:
            op = self.advance().text
            right = self.term()
            left = t.BinOp(self._span(left.span, right.span), left, op, right)
        return left

    def term(self) -> t.Expr:
        left = self.factor()
        while self.peek().kind is TokenKind.OPERATOR and self.peek().text in MUL_OPS:
            op = self.advance().text
            right = self.factor()
            left = t.BinOp(self._span(left.span, right.span), left, op, right)
        return left

    def factor(self) -> t.Expr:
        if self.at(TokenKind.OPERATOR, "-"):
            start = self.advance().span
            operand = self.factor()
            return t.UnaryOp(self._span(start, operand.span), "-", operand)
        return self.postfix()

    def postfix(self) -> t.Expr:
        expr = self.atom()
        while True:
            if self.at(TokenKind.DELIMITER, "("):
                if not isinstance(expr, t.Name):
                    raise ParseError(expr.span, "a function name before '('", "an expression")
                args, end = self.call_args()
                expr = t.Call(self._span(expr.span, end), expr, args)
            elif self.at(TokenKind.DELIMITER, "["):
                self.advance()
                index = self.expression()
                end = self.expect(TokenKind.DELIMITER, "]").span
                expr = t.Subscript(self._span(expr.span, end), expr, index)
            elif self.at(TokenKind.DELIMITER, "."):
                self.advance()
                method = self.expect(TokenKind.IDENTIFIER, expected="method name")
                if method.text != "append":
                    raise ParseError(method.span, "'append' (the only supported method)", repr(method.text))
                args, end = self.call_args()
                expr = t.MethodCall(self._span(expr.span, end), expr, method.text, args)
            else:
                return expr

    def call_args(self) -> tuple[list[t.Expr], SourceSpan]:
        self.expect(TokenKind.DELIMITER, "(")
        args: list[t.Expr] = []
        if not self.at(TokenKind.DELIMITER, ")"):
            while True:
                args.append(self.expression())
                if self.at(TokenKind.DELIMITER, ","):
                    self.advance()
                else:
                    break
        end = self.expect(TokenKind.DELIMITER, ")").span
        return args, end

    def atom(self) -> t.Expr:
        token = self.peek()
        if token.kind is TokenKind.IDENTIFIER:
            self.advance()
            if token.text == "True":
                return t.BoolLit(token.span, True)
            if token.text == "False":
                return t.BoolLit(token.span, False)
            if token.text == "None":
                return t.NoneLit(token.span)
            return t.Name(token.span, token.text)
        if token.kind is TokenKind.INT:
            self.advance()
            return t.IntLit(token.span, int(token.text))
        if token.kind is TokenKind.FLOAT:
            self.advance()
            return t.FloatLit(token.span, float(token.text))
        if token.kind is TokenKind.STRING:
            self.advance()
            return t.StringLit(token.span, decode_string(token.text))
        if token.kind is TokenKind.DELIMITER and token.text == "(":
            self.advance()
            inner = self.expression()
            self.expect(TokenKind.DELIMITER, ")")
            return inner
        if token.kind is TokenKind.DELIMITER and token.text == "[":
            start = self.advance().span
            elements: list[t.Expr] = []
            if not self.at(TokenKind.DELIMITER, "]"):
                while True:
                    elements.append(self.expression())
                    if self.at(TokenKind.DELIMITER, ","):
                        self.advance()
                    else:
                        break
            end = self.expect(TokenKind.DELIMITER, "]").span
            return t.ListDisplay(self._span(start, end), elements)
        raise self.fail("an expression")

    @staticmethod
    def _span(start: SourceSpan, end: SourceSpan) -> SourceSpan:
        return SourceSpan(start.start_line, start.start_col, end.end_line, end.end_col)


def parse(tokens: list[Token]) -> t.Program:
    """Parse a token stream into a Program; raises ParseError on the first error."""
    return _Parser(tokens).parse_program()


def parse_source(source: str) -> t.Program:
    """Tokenize and parse in one step."""
    return parse(tokenize(source))


def parse_diagnostic(source: str) -> str | None:
    """Human-readable first lex/parse error for ``source``, or None if it parses."""
    from .lexer import LexError

    try:
        parse_source(source)
        return None
    except (LexError, ParseError) as exc:
        return str(exc)
