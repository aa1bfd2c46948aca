"""Static analyses that feed question generation.

Three independent passes over a parsed program:

* identifier classification — variables, called built-ins, reserved words
  and defined function names, kept pairwise disjoint (shadowing wins);
* exception-source analysis — for each except clause, the lines inside its
  try block that can raise an error the clause catches;
* line-purpose classification — lines whose role matches one of four
  recognizable patterns (reading input, sentinel-based termination,
  filtering negatives, guarding a division).

The rule sets are the normative contract of this engine: a reported fact
must be defensible to the student reading the explanation, so the rules
err toward precision.  Lines matching more than one purpose rule are
excluded rather than guessed at.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from . import tree as t
from .interpreter import BUILTIN_NAMES, handler_catches
from .lexer import RESERVED_WORDS, SourceSpan

SENTINEL = -999


# --- identifier classification ---------------------------------------------

class VariableKind(Enum):
    ASSIGNED = "assigned"
    PARAMETER = "parameter"
    FOR_TARGET = "forTarget"
    EXCEPT_BINDING = "exceptBinding"


@dataclass
class VariableInfo:
    name: str
    kind: VariableKind
    definition_sites: list[SourceSpan]


@dataclass
class NameUse:
    name: str
    use_sites: list[SourceSpan]


@dataclass
class IdentifierTable:
    variables: dict[str, VariableInfo]
    builtins_used: dict[str, NameUse]
    keywords_used: dict[str, NameUse]
    function_names_defined: dict[str, SourceSpan]

    @property
    def variable_names(self) -> set[str]:
        return set(self.variables)


def _keyword_occurrences(node: t.Node):
    """Reserved words implied by a node, with the span that evidences them."""
    span = node.span
    if isinstance(node, t.FuncDef):
        yield "def", span
    elif isinstance(node, t.Return):
        yield "return", span
    elif isinstance(node, t.Break):
        yield "break", span
    elif isinstance(node, t.Continue):
        yield "continue", span
    elif isinstance(node, t.Pass):
        yield "pass", span
    elif isinstance(node, t.While):
        yield "while", span
    elif isinstance(node, t.If):
        yield "if", span
        if node.orelse is not None:
            yield "else", span
    elif isinstance(node, t.ElifClause):
        yield "elif", span
    elif isinstance(node, t.For):
        yield "for", span
        yield "in", span
    elif isinstance(node, t.Try):
        yield "try", span
    elif isinstance(node, t.Handler):
        yield "except", span
        if node.bound_name is not None:
            yield "as", span
    elif isinstance(node, t.BoolOp):
        yield node.op, span
    elif isinstance(node, t.UnaryOp) and node.op == "not":
        yield "not", span
    elif isinstance(node, t.BoolLit):
        yield "True" if node.value else "False", span
    elif isinstance(node, t.NoneLit):
        yield "None", span


def classify_identifiers(program: t.Program) -> IdentifierTable:
    """Split every name in the program into exactly one identifier class.

    Variables are names bound by assignment, parameters, for-targets or
    ``except ... as`` clauses.  Built-ins count only when called and never
    assigned; a name that shadows a built-in is a variable.  Function
    definition names form their own class and never feed answer options.
    """
    variables: dict[str, VariableInfo] = {}
    function_names: dict[str, SourceSpan] = {}
    called: dict[str, list[SourceSpan]] = {}
    keywords: dict[str, list[SourceSpan]] = {}

    def record_variable(name: str, kind: VariableKind, span: SourceSpan) -> None:
        info = variables.setdefault(name, VariableInfo(name, kind, []))
        info.definition_sites.append(span)

    for node in t.walk(program):
        if isinstance(node, (t.Assign, t.AugAssign)) and isinstance(node.target, t.Name):
            record_variable(node.target.id, VariableKind.ASSIGNED, node.target.span)
        elif isinstance(node, t.FuncDef):
            function_names.setdefault(node.name, node.span)
            for param in node.params:
                record_variable(param.id, VariableKind.PARAMETER, param.span)
        elif isinstance(node, t.For):
            record_variable(node.target.id, VariableKind.FOR_TARGET, node.target.span)
        elif isinstance(node, t.Handler) and node.bound_name is not None:
            record_variable(node.bound_name.id, VariableKind.EXCEPT_BINDING, node.bound_name.span)
        elif isinstance(node, t.Call):
            called.setdefault(node.callee.id, []).append(node.callee.span)
        for word, span in _keyword_occurrences(node):
            if word in RESERVED_WORDS:
                keywords.setdefault(word, []).append(span)

    for info in variables.values():
        info.definition_sites.sort(key=lambda s: (s.start_line, s.start_col))

    # shadowing wins: assigned names leave the function-name and builtin sets
    function_names = {n: s for n, s in function_names.items() if n not in variables}
    builtins_used = {
        name: NameUse(name, sites)
        for name, sites in sorted(called.items())
        if name in BUILTIN_NAMES and name not in variables and name not in function_names
    }
    keywords_used = {name: NameUse(name, sites) for name, sites in sorted(keywords.items())}
    return IdentifierTable(variables, builtins_used, keywords_used, function_names)


# --- exception-source analysis ----------------------------------------------

class RaiseReason(Enum):
    CONVERSION_CALL = "conversionCall"
    DIVISION_OP = "divisionOp"
    INPUT_CALL = "inputCall"


_REASON_EXCEPTIONS = {
    RaiseReason.CONVERSION_CALL: "ValueError",
    RaiseReason.DIVISION_OP: "ZeroDivisionError",
    RaiseReason.INPUT_CALL: "EndOfInput",
}


@dataclass(frozen=True)
class RaisingSite:
    line: int
    exception_name: str
    reason: RaiseReason
    span: SourceSpan


@dataclass
class ExceptFlow:
    try_line: int
    handler_line: int
    caught: list[str]  # empty = bare except
    raising_sites: list[RaisingSite]


def _is_numeric_literal(expr: t.Expr) -> bool:
    if isinstance(expr, (t.IntLit, t.FloatLit)):
        return True
    if isinstance(expr, t.UnaryOp) and expr.op == "-":
        return isinstance(expr.operand, (t.IntLit, t.FloatLit))
    return False


def _literal_number(expr: t.Expr) -> int | float | None:
    if isinstance(expr, (t.IntLit, t.FloatLit)):
        return expr.value
    if isinstance(expr, t.UnaryOp) and expr.op == "-" and isinstance(expr.operand, (t.IntLit, t.FloatLit)):
        return -expr.operand.value
    return None


def _shadowed_names(program: t.Program) -> set[str]:
    shadowed: set[str] = set()
    for node in t.walk(program):
        if isinstance(node, (t.Assign, t.AugAssign)) and isinstance(node.target, t.Name):
            shadowed.add(node.target.id)
        elif isinstance(node, t.FuncDef):
            shadowed.add(node.name)
            shadowed.update(p.id for p in node.params)
        elif isinstance(node, t.For):
            shadowed.add(node.target.id)
        elif isinstance(node, t.Handler) and node.bound_name is not None:
            shadowed.add(node.bound_name.id)
    return shadowed


def _candidate_sites(node: t.Node, shadowed: set[str], inner_filters: list[list[str]], out: list[RaisingSite]) -> None:
    """Collect raise-capable constructs under ``node``.

    ``inner_filters`` holds the except filters of nested try statements
    between the analyzed try block and the current node; a site whose
    exception one of them catches never escapes to the outer handler.
    """
    def suppressed(exception_name: str) -> bool:
        return any(handler_catches(filters, exception_name) for filters in inner_filters)

    if isinstance(node, t.FuncDef):
        return  # raises inside a nested definition surface at its call sites
    if isinstance(node, t.Call) and node.callee.id not in shadowed:
        if node.callee.id in ("int", "float"):
            if len(node.args) == 1 and not _is_numeric_literal(node.args[0]) and not suppressed("ValueError"):
                out.append(RaisingSite(node.span.start_line, "ValueError", RaiseReason.CONVERSION_CALL, node.span))
        elif node.callee.id == "input" and not suppressed("EndOfInput"):
            out.append(RaisingSite(node.span.start_line, "EndOfInput", RaiseReason.INPUT_CALL, node.span))
    if isinstance(node, t.BinOp) and node.op in ("/", "//", "%"):
        denominator = _literal_number(node.right)
        if (denominator is None or denominator == 0) and not suppressed("ZeroDivisionError"):
            out.append(RaisingSite(node.span.start_line, "ZeroDivisionError", RaiseReason.DIVISION_OP, node.span))
    if isinstance(node, t.Try):
        nested = inner_filters + [list(h.exception_names) for h in node.handlers]
        for stmt in node.body:
            _candidate_sites(stmt, shadowed, nested, out)
        for handler in node.handlers:
            for stmt in handler.body:
                _candidate_sites(stmt, shadowed, inner_filters, out)
        return
    for child in t.child_nodes(node):
        _candidate_sites(child, shadowed, inner_filters, out)


def except_sources(program: t.Program) -> list[ExceptFlow]:
    """One ExceptFlow per except clause, in source order.

    A raising site belongs to the first handler of its try statement whose
    filter matches the site's exception, mirroring runtime dispatch.
    """
    shadowed = _shadowed_names(program)
    flows: list[ExceptFlow] = []
    for node in t.walk(program):
        if not isinstance(node, t.Try):
            continue
        candidates: list[RaisingSite] = []
        for stmt in node.body:
            _candidate_sites(stmt, shadowed, [], candidates)
        candidates.sort(key=lambda s: (s.line, s.span.start_col))
        per_handler: list[list[RaisingSite]] = [[] for _ in node.handlers]
        for site in candidates:
            for index, handler in enumerate(node.handlers):
                if handler_catches(handler.exception_names, site.exception_name):
                    per_handler[index].append(site)
                    break
        for handler, sites in zip(node.handlers, per_handler):
            flows.append(
                ExceptFlow(
                    try_line=node.span.start_line,
                    handler_line=handler.span.start_line,
                    caught=list(handler.exception_names),
                    raising_sites=sites,
                )
            )
    flows.sort(key=lambda f: (f.try_line, f.handler_line))
    return flows


# --- line-purpose classification ---------------------------------------------

class Purpose(Enum):
    ACCEPTS_NEW_DATA = "AcceptsNewData"
    GUARDS_DIVISION_BY_ZERO = "GuardsDivisionByZero"
    SENTINEL_TERMINATION = "SentinelTermination"
    IGNORES_NEGATIVE_INPUT = "IgnoresNegativeInput"


@dataclass(frozen=True)
class PurposeFinding:
    line: int
    purpose: Purpose
    evidence: SourceSpan


def _contains_call_to(expr: t.Expr, names: tuple[str, ...], shadowed: set[str]) -> t.Call | None:
    for node in t.walk(expr):
        if isinstance(node, t.Call) and node.callee.id in names and node.callee.id not in shadowed:
            return node
    return None


def _input_derived_names(program: t.Program, shadowed: set[str]) -> set[str]:
    """Names assigned from ``input()`` directly or through one int/float call."""
    derived: set[str] = set()
    for node in t.walk(program):
        if not (isinstance(node, t.Assign) and isinstance(node.target, t.Name)):
            continue
        rhs = node.value
        if isinstance(rhs, t.Call) and rhs.callee.id == "input" and "input" not in shadowed:
            derived.add(node.target.id)
        elif (
            isinstance(rhs, t.Call)
            and rhs.callee.id in ("int", "float")
            and rhs.callee.id not in shadowed
            and len(rhs.args) == 1
            and isinstance(rhs.args[0], t.Call)
            and rhs.args[0].callee.id == "input"
            and "input" not in shadowed
        ):
            derived.add(node.target.id)
    return derived


def _compare_name_vs(cond: t.Expr) -> tuple[str, str, t.Expr] | None:
    """Unpack ``name OP literal`` or ``literal OP name`` comparisons.

    Returns (name, op-as-if-name-were-left, other side).
    """
    if not isinstance(cond, t.Compare):
        return None
    flipped = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}
    if isinstance(cond.left, t.Name):
        return cond.left.id, cond.op, cond.right
    if isinstance(cond.right, t.Name):
        return cond.right.id, flipped[cond.op], cond.left
    return None


def _is_zero_literal(expr: t.Expr) -> bool:
    value = _literal_number(expr)
    return value is not None and value == 0


def _is_sentinel_literal(expr: t.Expr, sentinel: int = SENTINEL) -> bool:
    if isinstance(expr, t.StringLit):
        return expr.value == str(sentinel)
    value = _literal_number(expr)
    return value is not None and value == sentinel


def _subtree_has(stmts: list[t.Stmt], node_types: tuple[type, ...]) -> bool:
    return any(isinstance(node, node_types) for stmt in stmts for node in t.walk(stmt))


def _has_division_by(stmts: list[t.Stmt], name: str) -> bool:
    for stmt in stmts:
        for node in t.walk(stmt):
            if (
                isinstance(node, t.BinOp)
                and node.op in ("/", "//", "%")
                and isinstance(node.right, t.Name)
                and node.right.id == name
            ):
                return True
    return False


def _is_accumulation(stmt: t.Stmt) -> bool:
    if isinstance(stmt, t.AugAssign):
        return True
    if isinstance(stmt, t.Assign) and isinstance(stmt.target, t.Name):
        return any(
            isinstance(node, t.Name) and node.id == stmt.target.id
            for node in t.walk(stmt.value)
        )
    if isinstance(stmt, t.ExprStmt) and isinstance(stmt.value, t.MethodCall):
        return stmt.value.method == "append"
    return False


def classify_purposes(program: t.Program, sentinel: int = SENTINEL) -> list[PurposeFinding]:
    """Lines whose role matches exactly one of the four purpose rules.

    Rules (a line matching two or more yields no finding at all):

    * AcceptsNewData — an assignment or expression statement whose right
      side calls ``input``.
    * SentinelTermination — an ``if``/``while`` condition comparing an
      input-derived name with the sentinel, where the branch taken on
      equality contains ``break`` or ``return``.
    * IgnoresNegativeInput — ``if name < 0`` whose body skips via
      ``continue``, or the inverted ``if name >= 0`` whose body performs
      the accumulation it guards.
    * GuardsDivisionByZero — an ``if``/``while`` condition comparing a
      name against zero where the protected code divides by that name;
      for ``== 0`` the branch must exit early and the protected code is
      whatever follows.
    """
    shadowed = _shadowed_names(program)
    derived = _input_derived_names(program, shadowed)
    raw: list[PurposeFinding] = []

    def found(line: int, purpose: Purpose, evidence: SourceSpan) -> None:
        raw.append(PurposeFinding(line, purpose, evidence))

    def scan_suite(stmts: list[t.Stmt]) -> None:
        for index, stmt in enumerate(stmts):
            line = stmt.span.start_line
            if isinstance(stmt, (t.Assign, t.AugAssign, t.ExprStmt)):
                rhs = stmt.value
                call = _contains_call_to(rhs, ("input",), shadowed)
                if call is not None:
                    found(line, Purpose.ACCEPTS_NEW_DATA, call.span)
            if isinstance(stmt, (t.If, t.While)):
                cond = stmt.cond
                unpacked = _compare_name_vs(cond)
                if unpacked is not None:
                    name, op, other = unpacked
                    body = stmt.body
                    orelse = stmt.orelse if isinstance(stmt, t.If) else None

                    if _is_sentinel_literal(other, sentinel) and name in derived:
                        branch = body if op == "==" else (orelse or []) if op == "!=" else None
                        if branch and _subtree_has(branch, (t.Break, t.Return)):
                            found(line, Purpose.SENTINEL_TERMINATION, cond.span)

                    if _is_zero_literal(other):
                        if op == "<" and _subtree_has(body, (t.Continue,)):
                            found(line, Purpose.IGNORES_NEGATIVE_INPUT, cond.span)
                        elif op == ">=" and any(_is_accumulation(s) for s in body):
                            found(line, Purpose.IGNORES_NEGATIVE_INPUT, cond.span)

                        if op in (">", "!=") and _has_division_by(body, name):
                            found(line, Purpose.GUARDS_DIVISION_BY_ZERO, cond.span)
                        elif op == "==" and _subtree_has(body, (t.Break, t.Continue, t.Return)):
                            protected = list(stmts[index + 1 :])
                            if orelse:
                                protected.extend(orelse)
                            if _has_division_by(protected, name):
                                found(line, Purpose.GUARDS_DIVISION_BY_ZERO, cond.span)

            # recurse into nested suites
            if isinstance(stmt, t.FuncDef):
                scan_suite(stmt.body)
            elif isinstance(stmt, (t.While, t.For)):
                scan_suite(stmt.body)
            elif isinstance(stmt, t.If):
                scan_suite(stmt.body)
                for clause in stmt.elifs:
                    scan_suite(clause.body)
                if stmt.orelse is not None:
                    scan_suite(stmt.orelse)
            elif isinstance(stmt, t.Try):
                scan_suite(stmt.body)
                for handler in stmt.handlers:
                    scan_suite(handler.body)

    scan_suite(program.body)

    by_line: dict[int, list[PurposeFinding]] = {}
    for finding in raw:
        by_line.setdefault(finding.line, []).append(finding)
    results: list[PurposeFinding] = []
    for line in sorted(by_line):
        purposes = {f.purpose for f in by_line[line]}
        if len(purposes) == 1:
            results.append(by_line[line][0])
    return results
