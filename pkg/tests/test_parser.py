import pytest

from qlc import tree as t
from qlc.lexer import LexError, source_slice, tokenize
from qlc.parser import ParseError, parse, parse_source


def test_minimal_assignment():
    program = parse_source("x = 1\n")
    assert len(program.body) == 1
    stmt = program.body[0]
    assert isinstance(stmt, t.Assign)
    assert isinstance(stmt.target, t.Name) and stmt.target.id == "x"
    assert isinstance(stmt.value, t.IntLit) and stmt.value.value == 1


def test_reference_solution_shape(reference_source):
    program = parse_source(reference_source)
    assert [type(s).__name__ for s in program.body] == ["FuncDef", "If"]
    func = program.body[0]
    assert func.name == "rain"
    assert [type(s).__name__ for s in func.body] == ["Assign", "Assign", "While", "If", "Return"]


def test_missing_colon_reports_line_one():
    with pytest.raises(ParseError) as err:
        parse_source("if x\n    pass\n")
    assert err.value.span.start_line == 1
    assert err.value.expected == "':'"


def test_empty_program_is_rejected():
    with pytest.raises(ParseError):
        parse_source("")
    with pytest.raises(ParseError):
        parse_source("# only a comment\n")


@pytest.mark.parametrize(
    "source",
    [
        "x = {1: 2}\n",            # dict display
        "@decorator\ndef f():\n    pass\n",
        "f = lambda x: x\n",
        "a < b < c\n",             # chained comparison
        "import os\n",
        "class C:\n    pass\n",
        "def f(a=1):\n    pass\n",  # default argument
        "x.pop()\n",               # only .append is a method
        "x = y.z\n",               # attribute access
        "break\n",                 # break outside loop
        "while True:\n    def g():\n        break\n",  # break across def boundary
        "continue\n",
        "return 1\n",              # return outside function
        "try:\n    pass\n",        # try without except
        "for x, y in z:\n    pass\n",
        "x = (1, 2)\n",            # tuple display
        "print('a'); print('b')\n",
        "x += 1 if True else 2\n",
        "while True: pass\n",      # inline suite
        "x[1:2]\n",                # slicing
        "f()()\n",                 # call of a call result
    ],
)
def test_rejection_completeness(source):
    with pytest.raises((ParseError, LexError)):
        parse_source(source)


def test_break_crosses_try_but_not_def():
    parse_source("while True:\n    try:\n        break\n    except:\n        continue\n")


def test_except_filter_forms():
    program = parse_source(
        "try:\n    pass\nexcept:\n    pass\n"
        "try:\n    pass\nexcept ValueError:\n    pass\n"
        "try:\n    pass\nexcept ValueError as e:\n    pass\n"
        "try:\n    pass\nexcept (ValueError, TypeError):\n    pass\n"
    )
    handlers = [stmt.handlers[0] for stmt in program.body]
    assert handlers[0].exception_names == []
    assert handlers[1].exception_names == ["ValueError"]
    assert handlers[2].bound_name.id == "e"
    assert handlers[3].exception_names == ["ValueError", "TypeError"]


def test_elif_else_chain():
    program = parse_source(
        "if a:\n    x = 1\nelif b:\n    x = 2\nelif c:\n    x = 3\nelse:\n    x = 4\n"
    )
    stmt = program.body[0]
    assert len(stmt.elifs) == 2
    assert stmt.orelse is not None


def test_operator_precedence():
    program = parse_source("x = 1 + 2 * 3\n")
    value = program.body[0].value
    assert value.op == "+"
    assert value.right.op == "*"

    program = parse_source("x = not a and b or c\n")
    value = program.body[0].value
    assert value.op == "or"
    assert value.left.op == "and"
    assert value.left.left.op == "not"


def test_literals_from_reserved_words():
    program = parse_source("a = True\nb = False\nc = None\n")
    assert isinstance(program.body[0].value, t.BoolLit)
    assert program.body[0].value.value is True
    assert isinstance(program.body[1].value, t.BoolLit)
    assert isinstance(program.body[2].value, t.NoneLit)


def test_reserved_literal_is_not_assignable():
    with pytest.raises(ParseError):
        parse_source("True = 5\n")


def test_method_call_and_subscript():
    program = parse_source("xs.append(x)\nxs[0] = xs[1]\n")
    call = program.body[0].value
    assert isinstance(call, t.MethodCall) and call.method == "append"
    assign = program.body[1]
    assert isinstance(assign.target, t.Subscript)


def test_child_spans_contained_in_parents(reference_source):
    program = parse_source(reference_source)

    def check(node):
        for child in t.child_nodes(node):
            assert (child.span.start_line, child.span.start_col) >= (
                node.span.start_line, node.span.start_col), (node, child)
            assert (child.span.end_line, child.span.end_col) <= (
                node.span.end_line, node.span.end_col), (node, child)
            check(child)

    check(program)


def _reparse_in_context(snippet: str) -> t.Stmt:
    """Parse a statement/expression snippet inside a loop-and-function context,
    so return/break/continue keep their surroundings."""
    indented = "\n".join("        " + line for line in snippet.split("\n"))
    wrapper = f"def __ctx__():\n    while True:\n{indented}\n"
    program = parse_source(wrapper)
    return program.body[0].body[0].body[0]


def _reparses_equal(source: str, node: t.Node) -> bool:
    snippet = source_slice(source, node.span)
    # the slice drops the first line's indentation; drop it from the
    # continuation lines as well so the block stays aligned
    prefix = node.span.start_col - 1
    lines = snippet.split("\n")
    normalized = [lines[0]]
    for line in lines[1:]:
        normalized.append(line[prefix:] if line[:prefix].strip() == "" else line)
    try:
        reparsed = _reparse_in_context("\n".join(normalized))
    except (LexError, ParseError):
        return False
    if isinstance(reparsed, t.ExprStmt) and not isinstance(node, t.ExprStmt):
        reparsed = reparsed.value
    return t.structurally_equal(node, reparsed)


def test_span_soundness_over_corpus(corpus_sources):
    """The source text addressed by any statement/expression span re-parses
    to a structurally equal node."""
    skip = (t.Program, t.Handler, t.ElifClause)
    for name, source in corpus_sources.items():
        program = parse_source(source)
        for node in t.walk(program):
            if isinstance(node, skip):
                continue
            assert _reparses_equal(source, node), (name, node)


def test_determinism(corpus_sources):
    for source in corpus_sources.values():
        assert t.structurally_equal(parse_source(source), parse_source(source))
        assert parse_source(source) == parse_source(source)
