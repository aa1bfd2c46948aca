"""Span-annotated syntax tree: node types, traversal and JSON round-tripping."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from typing import Iterator, Union

from .lexer import SourceSpan


class SchemaError(Exception):
    """Raised when serialized tree JSON is malformed."""


@dataclass
class Node:
    span: SourceSpan = field(repr=False)


# --- expressions ---------------------------------------------------------

@dataclass
class Name(Node):
    id: str


@dataclass
class IntLit(Node):
    value: int


@dataclass
class FloatLit(Node):
    value: float


@dataclass
class StringLit(Node):
    value: str


@dataclass
class BoolLit(Node):
    value: bool


@dataclass
class NoneLit(Node):
    pass


@dataclass
class ListDisplay(Node):
    elements: list[Expr]


@dataclass
class Subscript(Node):
    base: Expr
    index: Expr


@dataclass
class Call(Node):
    callee: Name
    args: list[Expr]


@dataclass
class MethodCall(Node):
    receiver: Expr
    method: str
    args: list[Expr]


@dataclass
class BinOp(Node):
    left: Expr
    op: str  # + - * / // %
    right: Expr


@dataclass
class Compare(Node):
    left: Expr
    op: str  # == != < <= > >=
    right: Expr


@dataclass
class BoolOp(Node):
    left: Expr
    op: str  # and | or
    right: Expr


@dataclass
class UnaryOp(Node):
    op: str  # - | not
    operand: Expr


Expr = Union[
    Name, IntLit, FloatLit, StringLit, BoolLit, NoneLit,
    ListDisplay, Subscript, Call, MethodCall, BinOp, Compare, BoolOp, UnaryOp,
]


# --- statements ----------------------------------------------------------

@dataclass
class Assign(Node):
    target: Expr  # Name or Subscript
    value: Expr


@dataclass
class AugAssign(Node):
    target: Expr
    op: str  # + - * /
    value: Expr


@dataclass
class ExprStmt(Node):
    value: Expr


@dataclass
class ElifClause(Node):
    cond: Expr
    body: list[Stmt]


@dataclass
class If(Node):
    cond: Expr
    body: list[Stmt]
    elifs: list[ElifClause]
    orelse: list[Stmt] | None


@dataclass
class While(Node):
    cond: Expr
    body: list[Stmt]


@dataclass
class For(Node):
    target: Name
    iterable: Expr
    body: list[Stmt]


@dataclass
class Handler(Node):
    exception_names: list[str]  # empty list = bare except
    bound_name: Name | None
    body: list[Stmt]


@dataclass
class Try(Node):
    body: list[Stmt]
    handlers: list[Handler]


@dataclass
class Return(Node):
    value: Expr | None


@dataclass
class Break(Node):
    pass


@dataclass
class Continue(Node):
    pass


@dataclass
class Pass(Node):
    pass


@dataclass
class FuncDef(Node):
    name: str
    params: list[Name]
    body: list[Stmt]


Stmt = Union[
    Assign, AugAssign, ExprStmt, If, While, For, Try,
    Return, Break, Continue, Pass, FuncDef,
]


@dataclass
class Program(Node):
    body: list[Stmt]


_NODE_TYPES = {
    cls.__name__: cls
    for cls in (
        Program, FuncDef, Assign, AugAssign, ExprStmt, If, ElifClause, While, For,
        Try, Handler, Return, Break, Continue, Pass,
        Name, IntLit, FloatLit, StringLit, BoolLit, NoneLit, ListDisplay,
        Subscript, Call, MethodCall, BinOp, Compare, BoolOp, UnaryOp,
    )
}


def child_nodes(node: Node) -> Iterator[Node]:
    """Direct child nodes, in source order."""
    for f in fields(node):
        if f.name == "span":
            continue
        value = getattr(node, f.name)
        if isinstance(value, Node):
            yield value
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, Node):
                    yield item


def walk(node: Node) -> Iterator[Node]:
    """The node and all of its descendants, preorder."""
    yield node
    for child in child_nodes(node):
        yield from walk(child)


def structurally_equal(a: Node, b: Node) -> bool:
    """Equality over node kinds and fields, ignoring source spans."""
    if type(a) is not type(b):
        return False
    for f in fields(a):
        if f.name == "span":
            continue
        va, vb = getattr(a, f.name), getattr(b, f.name)
        if isinstance(va, Node):
            if not (isinstance(vb, Node) and structurally_equal(va, vb)):
                return False
        elif isinstance(va, list):
            if not isinstance(vb, list) or len(va) != len(vb):
                return False
            for xa, xb in zip(va, vb):
                if isinstance(xa, Node):
                    if not (isinstance(xb, Node) and structurally_equal(xa, xb)):
                        return False
                elif xa != xb:
                    return False
        elif va != vb:
            return False
    return True


# --- JSON serialization ---------------------------------------------------

def _span_to_list(span: SourceSpan) -> list[int]:
    return [span.start_line, span.start_col, span.end_line, span.end_col]


def node_to_dict(node: Node) -> dict:
    out: dict = {"kind": type(node).__name__, "span": _span_to_list(node.span)}
    for f in fields(node):
        if f.name == "span":
            continue
        value = getattr(node, f.name)
        if isinstance(value, Node):
            out[f.name] = node_to_dict(value)
        elif isinstance(value, list):
            out[f.name] = [node_to_dict(v) if isinstance(v, Node) else v for v in value]
        else:
            out[f.name] = value
    return out


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise SchemaError(message)


def node_from_dict(data: object) -> Node:
    _require(isinstance(data, dict), "node must be an object")
    assert isinstance(data, dict)
    _require("kind" in data, "node is missing 'kind'")
    kind = data["kind"]
    _require(kind in _NODE_TYPES, f"unknown node kind {kind!r}")
    cls = _NODE_TYPES[kind]
    _require("span" in data, f"{kind} node is missing 'span'")
    raw_span = data["span"]
    _require(
        isinstance(raw_span, list) and len(raw_span) == 4
        and all(isinstance(v, int) for v in raw_span),
        f"{kind} span must be a list of four integers",
    )
    kwargs: dict = {"span": SourceSpan(*raw_span)}
    for f in fields(cls):
        if f.name == "span":
            continue
        _require(f.name in data, f"{kind} node is missing field {f.name!r}")
        value = data[f.name]
        if isinstance(value, dict) and "kind" in value:
            kwargs[f.name] = node_from_dict(value)
        elif isinstance(value, list):
            kwargs[f.name] = [
                node_from_dict(v) if isinstance(v, dict) else v for v in value
            ]
        else:
            kwargs[f.name] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise SchemaError(f"bad fields for {kind}: {exc}") from exc


def ast_to_json(program: Program, pretty: bool = False) -> str:
    """Stable JSON form of a syntax tree."""
    data = node_to_dict(program)
    if pretty:
        return json.dumps(data, indent=2, sort_keys=True)
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def ast_from_json(text: str) -> Program:
    """Parse a serialized tree back; raises SchemaError if malformed."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    node = node_from_dict(data)
    _require(isinstance(node, Program), "top-level node must be a Program")
    assert isinstance(node, Program)
    return node
