"""Deterministic tree-walking interpreter with scripted standard input.

Every execution consumes a fixed list of input lines (one per ``input()``
call) and produces an immutable trace: captured stdout lines, an ordered
list of call/raise/handle events, the final value or fault, and the number
of statement evaluations used.  A step limit bounds every run so infinite
loops terminate in a StepLimitExceeded fault.

Semantics follow the source language's reference behavior except where
noted: arithmetic and ordering comparisons require int/float (or both str
for ordering); booleans are not numbers; ``input()`` prompts are not
echoed to stdout; reading past the scripted input raises the catchable
``EndOfInput`` error; an out-of-range index reports a TypeFault (the
fault taxonomy has no dedicated lookup error).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from . import tree as t

Value = Union[int, float, str, bool, None, list]

DEFAULT_STEP_LIMIT = 100_000
MAX_CALL_DEPTH = 500

BUILTIN_NAMES = ("input", "print", "int", "float", "str", "len", "range", "abs", "round")


class FaultKind(Enum):
    VALUE_ERROR = "ValueErrorFault"
    ZERO_DIVISION = "ZeroDivisionFault"
    END_OF_INPUT = "EndOfInput"
    NAME_FAULT = "NameFault"
    TYPE_FAULT = "TypeFault"
    STEP_LIMIT = "StepLimitExceeded"


# Exception name a handler filter must match to catch each fault kind.
# StepLimitExceeded is a resource limit and cannot be caught.
_FAULT_EXCEPTION_NAMES = {
    FaultKind.VALUE_ERROR: "ValueError",
    FaultKind.ZERO_DIVISION: "ZeroDivisionError",
    FaultKind.END_OF_INPUT: "EndOfInput",
    FaultKind.NAME_FAULT: "NameError",
    FaultKind.TYPE_FAULT: "TypeError",
}


@dataclass(frozen=True)
class RuntimeFault:
    kind: FaultKind
    line: int
    message: str

    @property
    def exception_name(self) -> str | None:
        return _FAULT_EXCEPTION_NAMES.get(self.kind)


@dataclass(frozen=True)
class RaiseEvent:
    line: int
    exception_name: str


@dataclass(frozen=True)
class HandleEvent:
    handler_line: int
    exception_name: str


@dataclass(frozen=True)
class CallEvent:
    function_name: str
    line: int


TraceEvent = Union[RaiseEvent, HandleEvent, CallEvent]


@dataclass(frozen=True)
class IoScript:
    """Scripted stdin: each ``input()`` call consumes the next line in order."""

    input_lines: tuple[str, ...]

    def __init__(self, input_lines=()):
        object.__setattr__(self, "input_lines", tuple(input_lines))


@dataclass(frozen=True)
class ExecTrace:
    stdout: tuple[str, ...]
    events: tuple[TraceEvent, ...]
    result: Union[Value, RuntimeFault]
    steps_used: int

    @property
    def fault(self) -> RuntimeFault | None:
        return self.result if isinstance(self.result, RuntimeFault) else None


class UnknownFunctionError(Exception):
    """Requested entry function is missing or has the wrong arity."""


def handler_catches(caught_names: list[str] | tuple[str, ...], exception_name: str) -> bool:
    """Does an except clause with these filters catch ``exception_name``?

    A bare except (no filters) and ``except Exception`` catch everything;
    ``EOFError`` is accepted as the source-language name for EndOfInput.
    """
    if not caught_names:
        return True
    for name in caught_names:
        if name == exception_name or name == "Exception":
            return True
        if name == "EOFError" and exception_name == "EndOfInput":
            return True
    return False


def format_value(value: Value) -> str:
    """Rendering used by ``print`` and ``str``: round-trip floats, Python-style lists."""
    if value is None:
        return "None"
    if value is True:
        return "True"
    if value is False:
        return "False"
    if isinstance(value, str):
        return value
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return "[" + ", ".join(_repr_value(v) for v in value) + "]"
    return str(value)


def _repr_value(value: Value) -> str:
    if isinstance(value, str):
        return repr(value)
    return format_value(value)


class _Raise(Exception):
    """Internal signal for a catchable fault."""

    def __init__(self, fault: RuntimeFault):
        self.fault = fault


class _Abort(Exception):
    """Internal signal for an uncatchable fault (step limit)."""

    def __init__(self, fault: RuntimeFault):
        self.fault = fault


class _BreakSignal(Exception):
    pass


class _ContinueSignal(Exception):
    pass


class _ReturnSignal(Exception):
    def __init__(self, value: Value):
        self.value = value


@dataclass
class _Function:
    definition: t.FuncDef


class _Executor:
    def __init__(self, io: IoScript, step_limit: int):
        self.inputs = list(io.input_lines)
        self.input_pos = 0
        self.step_limit = step_limit
        self.steps = 0
        self.stdout: list[str] = []
        self.events: list[TraceEvent] = []
        self.globals: dict[str, Value] = {}
        self.call_depth = 0

    # --- plumbing ----------------------------------------------------------

    def fault(self, kind: FaultKind, node: t.Node, message: str) -> _Raise:
        line = node.span.start_line
        fault = RuntimeFault(kind, line, message)
        name = fault.exception_name
        if name is not None:
            self.events.append(RaiseEvent(line, name))
        return _Raise(fault)

    def count_step(self, node: t.Node) -> None:
        self.steps += 1
        if self.steps > self.step_limit:
            raise _Abort(
                RuntimeFault(FaultKind.STEP_LIMIT, node.span.start_line, "step limit exceeded")
            )

    # --- statements --------------------------------------------------------

    def run_block(self, stmts: list[t.Stmt], env: dict[str, Value] | None) -> None:
        for stmt in stmts:
            self.execute_stmt(stmt, env)

    def execute_stmt(self, stmt: t.Stmt, env: dict[str, Value] | None) -> None:
        self.count_step(stmt)
        if isinstance(stmt, t.Assign):
            value = self.eval(stmt.value, env)
            self.assign(stmt.target, value, env)
        elif isinstance(stmt, t.AugAssign):
            current = self.load_target(stmt.target, env)
            value = self.eval(stmt.value, env)
            result = self.binary_op(stmt.op, current, value, stmt)
            self.assign(stmt.target, result, env)
        elif isinstance(stmt, t.ExprStmt):
            self.eval(stmt.value, env)
        elif isinstance(stmt, t.If):
            if self.truthy(self.eval(stmt.cond, env)):
                self.run_block(stmt.body, env)
                return
            for clause in stmt.elifs:
                self.count_step(clause)
                if self.truthy(self.eval(clause.cond, env)):
                    self.run_block(clause.body, env)
                    return
            if stmt.orelse is not None:
                self.run_block(stmt.orelse, env)
        elif isinstance(stmt, t.While):
            while True:
                self.count_step(stmt)
                if not self.truthy(self.eval(stmt.cond, env)):
                    break
                try:
                    self.run_block(stmt.body, env)
                except _BreakSignal:
                    break
                except _ContinueSignal:
                    continue
        elif isinstance(stmt, t.For):
            iterable = self.eval(stmt.iterable, env)
            if isinstance(iterable, str):
                items: list[Value] = list(iterable)
            elif isinstance(iterable, list):
                items = iterable
            else:
                raise self.fault(FaultKind.TYPE_FAULT, stmt.iterable, "for-loop target is not iterable")
            index = 0
            while index < len(items):  # live list, like the reference language
                self.count_step(stmt)
                self.bind_name(stmt.target.id, items[index], env)
                index += 1
                try:
                    self.run_block(stmt.body, env)
                except _BreakSignal:
                    break
                except _ContinueSignal:
                    continue
        elif isinstance(stmt, t.Try):
            try:
                self.run_block(stmt.body, env)
            except _Raise as signal:
                exception_name = signal.fault.exception_name
                assert exception_name is not None
                for handler in stmt.handlers:
                    if handler_catches(handler.exception_names, exception_name):
                        self.events.append(HandleEvent(handler.span.start_line, exception_name))
                        if handler.bound_name is not None:
                            self.bind_name(handler.bound_name.id, signal.fault.message, env)
                        self.run_block(handler.body, env)
                        return
                raise
        elif isinstance(stmt, t.Return):
            value = self.eval(stmt.value, env) if stmt.value is not None else None
            raise _ReturnSignal(value)
        elif isinstance(stmt, t.Break):
            raise _BreakSignal()
        elif isinstance(stmt, t.Continue):
            raise _ContinueSignal()
        elif isinstance(stmt, t.Pass):
            pass
        elif isinstance(stmt, t.FuncDef):
            self.globals[stmt.name] = _Function(stmt)
        else:  # pragma: no cover
            raise AssertionError(f"unhandled statement {type(stmt).__name__}")

    def assign(self, target: t.Expr, value: Value, env: dict[str, Value] | None) -> None:
        if isinstance(target, t.Name):
            self.bind_name(target.id, value, env)
            return
        assert isinstance(target, t.Subscript)
        base = self.eval(target.base, env)
        index = self.eval(target.index, env)
        if not isinstance(base, list):
            raise self.fault(FaultKind.TYPE_FAULT, target, "subscript assignment needs a list")
        if isinstance(index, bool) or not isinstance(index, int):
            raise self.fault(FaultKind.TYPE_FAULT, target.index, "list index must be an integer")
        if not -len(base) <= index < len(base):
            raise self.fault(FaultKind.TYPE_FAULT, target.index, "list index out of range")
        base[index] = value

    def load_target(self, target: t.Expr, env: dict[str, Value] | None) -> Value:
        return self.eval(target, env)

    def bind_name(self, name: str, value: Value, env: dict[str, Value] | None) -> None:
        (env if env is not None else self.globals)[name] = value

    # --- expressions -------------------------------------------------------

    def eval(self, expr: t.Expr, env: dict[str, Value] | None) -> Value:
        if isinstance(expr, t.Name):
            if env is not None and expr.id in env:
                return env[expr.id]
            if expr.id in self.globals:
                return self.globals[expr.id]
            raise self.fault(FaultKind.NAME_FAULT, expr, f"name {expr.id!r} is not defined")
        if isinstance(expr, (t.IntLit, t.FloatLit, t.StringLit, t.BoolLit)):
            return expr.value
        if isinstance(expr, t.NoneLit):
            return None
        if isinstance(expr, t.ListDisplay):
            return [self.eval(el, env) for el in expr.elements]
        if isinstance(expr, t.Subscript):
            return self.eval_subscript(expr, env)
        if isinstance(expr, t.Call):
            return self.eval_call(expr, env)
        if isinstance(expr, t.MethodCall):
            return self.eval_method_call(expr, env)
        if isinstance(expr, t.BinOp):
            left = self.eval(expr.left, env)
            right = self.eval(expr.right, env)
            return self.binary_op(expr.op, left, right, expr)
        if isinstance(expr, t.Compare):
            left = self.eval(expr.left, env)
            right = self.eval(expr.right, env)
            return self.compare_op(expr.op, left, right, expr)
        if isinstance(expr, t.BoolOp):
            left = self.eval(expr.left, env)
            if expr.op == "and":
                return self.eval(expr.right, env) if self.truthy(left) else left
            return left if self.truthy(left) else self.eval(expr.right, env)
        if isinstance(expr, t.UnaryOp):
            operand = self.eval(expr.operand, env)
            if expr.op == "not":
                return not self.truthy(operand)
            if self._is_number(operand):
                return -operand
            raise self.fault(FaultKind.TYPE_FAULT, expr, "unary '-' needs a number")
        raise AssertionError(f"unhandled expression {type(expr).__name__}")  # pragma: no cover

    def eval_subscript(self, expr: t.Subscript, env: dict[str, Value] | None) -> Value:
        base = self.eval(expr.base, env)
        index = self.eval(expr.index, env)
        if isinstance(index, bool) or not isinstance(index, int):
            raise self.fault(FaultKind.TYPE_FAULT, expr.index, "subscript index must be an integer")
        if isinstance(base, (str, list)):
            if not -len(base) <= index < len(base):
                raise self.fault(FaultKind.TYPE_FAULT, expr.index, "index out of range")
            return base[index]
        raise self.fault(FaultKind.TYPE_FAULT, expr.base, "value is not subscriptable")

    def eval_method_call(self, expr: t.MethodCall, env: dict[str, Value] | None) -> Value:
        receiver = self.eval(expr.receiver, env)
        args = [self.eval(a, env) for a in expr.args]
        if not isinstance(receiver, list):
            raise self.fault(FaultKind.TYPE_FAULT, expr, "append() needs a list")
        if len(args) != 1:
            raise self.fault(FaultKind.TYPE_FAULT, expr, "append() takes exactly one argument")
        receiver.append(args[0])
        return None

    def eval_call(self, expr: t.Call, env: dict[str, Value] | None) -> Value:
        name = expr.callee.id
        if env is not None and name in env:
            target = env[name]
        elif name in self.globals:
            target = self.globals[name]
        elif name in BUILTIN_NAMES:
            args = [self.eval(a, env) for a in expr.args]
            return self.call_builtin(name, args, expr)
        else:
            raise self.fault(FaultKind.NAME_FAULT, expr.callee, f"name {name!r} is not defined")
        args = [self.eval(a, env) for a in expr.args]
        if not isinstance(target, _Function):
            raise self.fault(FaultKind.TYPE_FAULT, expr, f"{name!r} is not callable")
        return self.call_function_object(target, args, expr)

    def call_function_object(self, function: _Function, args: list[Value], site: t.Node) -> Value:
        definition = function.definition
        if len(args) != len(definition.params):
            raise self.fault(
                FaultKind.TYPE_FAULT, site,
                f"{definition.name}() takes {len(definition.params)} arguments, got {len(args)}",
            )
        self.events.append(CallEvent(definition.name, site.span.start_line))
        if self.call_depth >= MAX_CALL_DEPTH:
            raise _Abort(
                RuntimeFault(FaultKind.STEP_LIMIT, site.span.start_line, "call depth limit exceeded")
            )
        local_env = {param.id: value for param, value in zip(definition.params, args)}
        self.call_depth += 1
        try:
            self.run_block(definition.body, local_env)
            return None
        except _ReturnSignal as signal:
            return signal.value
        finally:
            self.call_depth -= 1

    # --- builtins ----------------------------------------------------------

    def call_builtin(self, name: str, args: list[Value], site: t.Node) -> Value:
        if name == "input":
            if len(args) > 1:
                raise self.fault(FaultKind.TYPE_FAULT, site, "input() takes at most one argument")
            if self.input_pos >= len(self.inputs):
                raise self.fault(FaultKind.END_OF_INPUT, site, "no more scripted input")
            line = self.inputs[self.input_pos]
            self.input_pos += 1
            return line
        if name == "print":
            self.stdout.append(" ".join(format_value(a) for a in args))
            return None
        if name == "int":
            return self.convert(int, args, site)
        if name == "float":
            return self.convert(float, args, site)
        if name == "str":
            self.require_arity(args, 1, "str", site)
            return format_value(args[0])
        if name == "len":
            self.require_arity(args, 1, "len", site)
            if isinstance(args[0], (str, list)):
                return len(args[0])
            raise self.fault(FaultKind.TYPE_FAULT, site, "len() needs a string or list")
        if name == "range":
            if not 1 <= len(args) <= 3 or any(isinstance(a, bool) or not isinstance(a, int) for a in args):
                raise self.fault(FaultKind.TYPE_FAULT, site, "range() takes 1-3 integer arguments")
            if len(args) == 3 and args[2] == 0:
                raise self.fault(FaultKind.VALUE_ERROR, site, "range() step must not be zero")
            result = range(*args)  # type: ignore[arg-type]
            if len(result) > 1_000_000:
                raise _Abort(
                    RuntimeFault(FaultKind.STEP_LIMIT, site.span.start_line, "range() result too large")
                )
            return list(result)
        if name == "abs":
            self.require_arity(args, 1, "abs", site)
            if self._is_number(args[0]):
                return abs(args[0])
            raise self.fault(FaultKind.TYPE_FAULT, site, "abs() needs a number")
        if name == "round":
            if not 1 <= len(args) <= 2:
                raise self.fault(FaultKind.TYPE_FAULT, site, "round() takes one or two arguments")
            if not self._is_number(args[0]) or (len(args) == 2 and not isinstance(args[1], int)):
                raise self.fault(FaultKind.TYPE_FAULT, site, "round() needs numeric arguments")
            return round(*args)  # type: ignore[arg-type]
        raise AssertionError(f"unhandled builtin {name}")  # pragma: no cover

    def require_arity(self, args: list[Value], n: int, name: str, site: t.Node) -> None:
        if len(args) != n:
            raise self.fault(FaultKind.TYPE_FAULT, site, f"{name}() takes exactly {n} argument")

    def convert(self, converter: type, args: list[Value], site: t.Node) -> Value:
        name = converter.__name__
        self.require_arity(args, 1, name, site)
        value = args[0]
        if isinstance(value, bool):
            return converter(value)
        if isinstance(value, (int, float)):
            return converter(value)
        if isinstance(value, str):
            try:
                return converter(value)
            except ValueError:
                raise self.fault(
                    FaultKind.VALUE_ERROR, site,
                    f"could not convert {value!r} with {name}()",
                ) from None
        raise self.fault(FaultKind.TYPE_FAULT, site, f"{name}() argument must be a string or number")

    # --- operators ---------------------------------------------------------

    @staticmethod
    def _is_number(value: Value) -> bool:
        return isinstance(value, (int, float)) and not isinstance(value, bool)

    def truthy(self, value: Value) -> bool:
        return bool(value)

    def binary_op(self, op: str, left: Value, right: Value, node: t.Node) -> Value:
        if op == "+" and isinstance(left, str) and isinstance(right, str):
            return left + right
        if op == "+" and isinstance(left, list) and isinstance(right, list):
            return left + right
        if not (self._is_number(left) and self._is_number(right)):
            raise self.fault(FaultKind.TYPE_FAULT, node, f"unsupported operands for {op!r}")
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op in ("/", "//", "%"):
            if right == 0:
                raise self.fault(FaultKind.ZERO_DIVISION, node, "division by zero")
            if op == "/":
                return left / right
            if op == "//":
                return left // right
            return left % right
        raise AssertionError(f"unhandled operator {op}")  # pragma: no cover

    def compare_op(self, op: str, left: Value, right: Value, node: t.Node) -> bool:
        if op == "==":
            return left == right
        if op == "!=":
            return left != right
        both_numbers = self._is_number(left) and self._is_number(right)
        both_strings = isinstance(left, str) and isinstance(right, str)
        if not (both_numbers or both_strings):
            raise self.fault(FaultKind.TYPE_FAULT, node, f"unsupported comparison {op!r}")
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        return left >= right

    def trace(self, result: Union[Value, RuntimeFault]) -> ExecTrace:
        return ExecTrace(tuple(self.stdout), tuple(self.events), result, self.steps)


def execute(program: t.Program, io: IoScript, step_limit: int = DEFAULT_STEP_LIMIT) -> ExecTrace:
    """Run a program's module-level statements with ``__name__`` set to "__main__"."""
    executor = _Executor(io, step_limit)
    executor.globals["__name__"] = "__main__"
    try:
        executor.run_block(program.body, None)
        return executor.trace(None)
    except (_Raise, _Abort) as signal:
        return executor.trace(signal.fault)


def call_function(
    program: t.Program,
    name: str,
    args: list[Value],
    io: IoScript,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> ExecTrace:
    """Bind the program's function definitions, then call one directly.

    Module-level statements other than ``def`` do not run.  Raises
    UnknownFunctionError if no definition matches the name and arity.
    """
    executor = _Executor(io, step_limit)
    executor.globals["__name__"] = "__main__"
    target: t.FuncDef | None = None
    for stmt in program.body:
        if isinstance(stmt, t.FuncDef):
            executor.globals[stmt.name] = _Function(stmt)
            if stmt.name == name:
                target = stmt
    if target is None:
        raise UnknownFunctionError(f"program defines no function named {name!r}")
    if len(target.params) != len(args):
        raise UnknownFunctionError(
            f"{name}() takes {len(target.params)} arguments, got {len(args)}"
        )
    try:
        result = executor.call_function_object(executor.globals[name], args, target)  # type: ignore[arg-type]
        return executor.trace(result)
    except (_Raise, _Abort) as signal:
        return executor.trace(signal.fault)
