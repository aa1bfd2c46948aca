"""Questionnaire assembly from static-analysis results.

Builds two or three multiple-choice questions about the submitted program:

* variable recognition (checkbox; every program variable is correct, four
  seeded distractors drawn from called built-ins, reserved words and a
  fixed pool of plausible-but-unused names);
* exception source (which line can jump to a given except line);
* line purpose (what a given line is for).

Generation is a pure function of the analyzed tree and an integer seed:
the same program and seed always produce byte-identical questionnaires,
including option order.  Every option carries an explanation shown after
answering; the student-facing serialization strips correctness flags and
explanations.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from enum import Enum

from . import tree as t
from .analysis import (
    ExceptFlow,
    IdentifierTable,
    Purpose,
    PurposeFinding,
    RaiseReason,
    RaisingSite,
)


class QlcType(Enum):
    VARIABLE_NAMES = "Q1_VariableNames"
    EXCEPT_SOURCE = "Q2_ExceptSource"
    LINE_PURPOSE = "Q3_LinePurpose"


BLOCK_MODEL_TAGS = {
    QlcType.VARIABLE_NAMES: "atom-text",
    QlcType.EXCEPT_SOURCE: "relations-execution",
    QlcType.LINE_PURPOSE: "atom-purpose",
}

SHORT_TYPE_NAMES = {
    QlcType.VARIABLE_NAMES: "Q1",
    QlcType.EXCEPT_SOURCE: "Q2",
    QlcType.LINE_PURPOSE: "Q3",
}


class OptionCategory(Enum):
    VARIABLE = "variable"
    BUILTIN_USED = "builtinUsed"
    RESERVED_WORD = "reservedWord"
    UNUSED_WORD = "unusedWord"
    RAISING_LINE = "raisingLine"
    TRY_LINE = "tryLine"
    OUTSIDE_BEFORE_TRY = "outsideBeforeTry"
    PURPOSE_LABEL = "purposeLabel"


PURPOSE_LABELS = {
    Purpose.ACCEPTS_NEW_DATA: "Accepts new data",
    Purpose.GUARDS_DIVISION_BY_ZERO: "Guards against division by zero",
    Purpose.SENTINEL_TERMINATION: "Is a condition for ending the program",
    Purpose.IGNORES_NEGATIVE_INPUT: "Ignores negative input",
}

# Variant tag recorded with answered purpose questions so analytics can
# report per-variant success rates.
PURPOSE_VARIANTS = {
    Purpose.ACCEPTS_NEW_DATA: "input",
    Purpose.GUARDS_DIVISION_BY_ZERO: "division",
    Purpose.SENTINEL_TERMINATION: "sentinel",
    Purpose.IGNORES_NEGATIVE_INPUT: "negative",
}

UNUSED_WORD_POOL = ("n", "total", "count", "result", "temp", "data", "other")

DISTRACTOR_COUNT = 4
MAX_FROM_BUILTINS = 2
MAX_FROM_KEYWORDS = 2

PROMPTS = {
    QlcType.VARIABLE_NAMES: "Which of the following are variable names in the program?",
    QlcType.EXCEPT_SOURCE: "From which line can program execution jump to line {line}?",
    QlcType.LINE_PURPOSE: "Which of the following best describes the purpose of line {line}?",
}


class GenerationError(Exception):
    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason  # "Q1Impossible" | "Q3Impossible" | "NothingToAsk"


@dataclass(frozen=True)
class AnswerOption:
    id: str
    label: str
    is_correct: bool
    category: OptionCategory
    explanation: str


@dataclass(frozen=True)
class Qlc:
    id: str
    type: QlcType
    prompt: str
    options: tuple[AnswerOption, ...]
    multi_select: bool
    target_line: int | None = None
    variant: str | None = None

    @property
    def correct_option_ids(self) -> set[str]:
        return {o.id for o in self.options if o.is_correct}


@dataclass(frozen=True)
class Questionnaire:
    id: str
    source_hash: str
    seed: int
    questions: tuple[Qlc, ...]

    def question_by_id(self, question_id: str) -> Qlc | None:
        for q in self.questions:
            if q.id == question_id:
                return q
        return None


def program_hash(program: t.Program) -> str:
    """Content hash of a program: digest of its canonical tree JSON."""
    return hashlib.sha256(t.ast_to_json(program).encode("utf-8")).hexdigest()


def render_prompt(qlc_type: QlcType, target_line: int | None = None) -> str:
    template = PROMPTS[qlc_type]
    if "{line}" in template:
        if target_line is None:
            raise ValueError(f"{qlc_type.value} prompt needs a target line")
        return template.format(line=target_line)
    return template


# --- explanations ----------------------------------------------------------

def _variable_explanation(name: str, table: IdentifierTable) -> str:
    info = table.variables.get(name)
    if info and info.definition_sites:
        line = info.definition_sites[0].start_line
        return f"{name} is a variable in your program; it first gets a value on line {line}."
    return f"{name} is a variable in your program."

def _raising_site_explanation(site: RaisingSite, handler_line: int) -> str:
    if site.reason is RaiseReason.CONVERSION_CALL:
        detail = "converts text to a number and raises ValueError when the text is not numeric"
    elif site.reason is RaiseReason.DIVISION_OP:
        detail = "divides by a value that can be zero, raising ZeroDivisionError"
    else:
        detail = "reads input and raises an end-of-input error when no input is left"
    return (
        f"Line {site.line} {detail}; when that happens execution jumps to the "
        f"except block on line {handler_line}."
    )

TRY_LINE_EXPLANATION = (
    "This line starts the try block; execution enters the except block from "
    "the line that raises the error."
)

def _outside_before_explanation(line: int) -> str:
    return (
        f"Line {line} runs outside and before the try block, so an error there "
        "cannot transfer execution into this except block."
    )

_PURPOSE_CORRECT_EXPLANATIONS = {
    Purpose.ACCEPTS_NEW_DATA: "This line reads a new value from the user, accepting new data into the program.",
    Purpose.GUARDS_DIVISION_BY_ZERO: "This line checks the value used as a denominator, skipping the division that would otherwise divide by zero.",
    Purpose.SENTINEL_TERMINATION: "This line compares the input against the stop value, so it is the condition that ends the program's input loop.",
    Purpose.IGNORES_NEGATIVE_INPUT: "This line filters out negative values so they are ignored by the calculation.",
}

_PURPOSE_WRONG_EXPLANATIONS = {
    Purpose.ACCEPTS_NEW_DATA: "The line in question does not read any input.",
    Purpose.GUARDS_DIVISION_BY_ZERO: "The line in question does not protect a division from a zero denominator.",
    Purpose.SENTINEL_TERMINATION: "The line in question does not check for the value that ends the program.",
    Purpose.IGNORES_NEGATIVE_INPUT: "The line in question does not filter out negative values.",
}


def explanation_for(option: AnswerOption, context: t.Program | None = None) -> str:
    """Explanation text shown for an option after answering."""
    return option.explanation


# --- generation ------------------------------------------------------------

def _names_in_program(program: t.Program, table: IdentifierTable) -> set[str]:
    names = set(table.variables) | set(table.builtins_used) | set(table.keywords_used)
    names |= set(table.function_names_defined)
    for node in t.walk(program):
        if isinstance(node, t.Name):
            names.add(node.id)
    return names


def _build_q1(
    qid: str,
    table: IdentifierTable,
    program: t.Program,
    rng: random.Random,
) -> Qlc:
    variables = sorted(table.variables)
    if not variables:
        raise GenerationError("Q1Impossible", "program defines no variables")

    builtin_pool = sorted(table.builtins_used)
    keyword_pool = sorted(table.keywords_used)
    builtins = rng.sample(builtin_pool, min(MAX_FROM_BUILTINS, len(builtin_pool)))
    keywords = rng.sample(keyword_pool, min(MAX_FROM_KEYWORDS, len(keyword_pool)))
    unused_pool = sorted(set(UNUSED_WORD_POOL) - _names_in_program(program, table))
    need = DISTRACTOR_COUNT - len(builtins) - len(keywords)
    unused = rng.sample(unused_pool, min(max(need, 0), len(unused_pool)))

    entries: list[tuple[str, bool, OptionCategory, str]] = []
    for name in variables:
        entries.append((name, True, OptionCategory.VARIABLE, _variable_explanation(name, table)))
    for name in builtins:
        entries.append((
            name, False, OptionCategory.BUILTIN_USED,
            f"{name} is a built-in function, not a variable defined in your program.",
        ))
    for name in keywords:
        entries.append((
            name, False, OptionCategory.RESERVED_WORD,
            f"{name} is a reserved word of the language, not a variable defined in your program.",
        ))
    for name in unused:
        entries.append((
            name, False, OptionCategory.UNUSED_WORD,
            f"{name} does not appear anywhere in your program.",
        ))
    rng.shuffle(entries)
    options = tuple(
        AnswerOption(f"{qid}-o{i}", label, correct, category, explanation)
        for i, (label, correct, category, explanation) in enumerate(entries, start=1)
    )
    return Qlc(qid, QlcType.VARIABLE_NAMES, render_prompt(QlcType.VARIABLE_NAMES), options, True)


def _statement_lines_before(program: t.Program, line: int) -> list[int]:
    lines = set()
    for node in t.walk(program):
        if isinstance(node, (t.Program, t.ElifClause, t.Handler)):
            continue
        if isinstance(node, t.Node) and not isinstance(node, tuple(_EXPR_TYPES)):
            if node.span.start_line < line:
                lines.add(node.span.start_line)
    return sorted(lines)


_EXPR_TYPES = (
    t.Name, t.IntLit, t.FloatLit, t.StringLit, t.BoolLit, t.NoneLit,
    t.ListDisplay, t.Subscript, t.Call, t.MethodCall, t.BinOp, t.Compare,
    t.BoolOp, t.UnaryOp,
)


def _build_q2(qid: str, flows: list[ExceptFlow], program: t.Program, rng: random.Random) -> Qlc | None:
    eligible = [f for f in flows if f.raising_sites]
    if not eligible:
        return None
    flow = eligible[0]
    correct_site = min(flow.raising_sites, key=lambda s: s.line)

    entries: list[tuple[int, bool, OptionCategory, str]] = [
        (correct_site.line, True, OptionCategory.RAISING_LINE,
         _raising_site_explanation(correct_site, flow.handler_line)),
        (flow.try_line, False, OptionCategory.TRY_LINE, TRY_LINE_EXPLANATION),
    ]
    outside_candidates = [
        n for n in _statement_lines_before(program, flow.try_line)
        if n != correct_site.line
    ]
    if outside_candidates:
        outside = rng.choice(outside_candidates)
        entries.append(
            (outside, False, OptionCategory.OUTSIDE_BEFORE_TRY, _outside_before_explanation(outside))
        )
    rng.shuffle(entries)
    options = tuple(
        AnswerOption(f"{qid}-o{i}", f"line {line}", correct, category, explanation)
        for i, (line, correct, category, explanation) in enumerate(entries, start=1)
    )
    prompt = render_prompt(QlcType.EXCEPT_SOURCE, flow.handler_line)
    return Qlc(qid, QlcType.EXCEPT_SOURCE, prompt, options, False, target_line=flow.handler_line)


def _build_q3(qid: str, purposes: list[PurposeFinding], rng: random.Random) -> Qlc:
    target = rng.choice(sorted(purposes, key=lambda p: p.line))
    entries: list[tuple[Purpose, bool, str]] = []
    for purpose in Purpose:
        if purpose is target.purpose:
            entries.append((purpose, True, _PURPOSE_CORRECT_EXPLANATIONS[purpose]))
        else:
            entries.append((purpose, False, _PURPOSE_WRONG_EXPLANATIONS[purpose]))
    rng.shuffle(entries)
    options = tuple(
        AnswerOption(f"{qid}-o{i}", PURPOSE_LABELS[purpose], correct, OptionCategory.PURPOSE_LABEL, explanation)
        for i, (purpose, correct, explanation) in enumerate(entries, start=1)
    )
    prompt = render_prompt(QlcType.LINE_PURPOSE, target.line)
    return Qlc(
        qid, QlcType.LINE_PURPOSE, prompt, options, False,
        target_line=target.line, variant=PURPOSE_VARIANTS[target.purpose],
    )


def generate_questionnaire(
    program: t.Program,
    table: IdentifierTable,
    flows: list[ExceptFlow],
    purposes: list[PurposeFinding],
    seed: int,
) -> Questionnaire:
    """Assemble the questionnaire for one analyzed program.

    The variable question and the purpose question are always attempted;
    the exception question appears exactly when the program has a try
    block with at least one raising site.  A missing prerequisite drops
    the affected question; if neither the variable nor the purpose
    question can be built, generation fails.
    """
    source_hash = program_hash(program)
    questionnaire_id = f"{source_hash[:12]}-{seed}"
    rng = random.Random(seed)

    questions: list[Qlc] = []
    q1_error: GenerationError | None = None
    try:
        questions.append(_build_q1(f"{questionnaire_id}-q1", table, program, rng))
    except GenerationError as exc:
        q1_error = exc

    q2 = _build_q2(f"{questionnaire_id}-q2", flows, program, rng)
    if q2 is not None:
        questions.append(q2)

    if purposes:
        questions.append(_build_q3(f"{questionnaire_id}-q3", purposes, rng))
    elif q1_error is not None:
        raise GenerationError(
            "NothingToAsk",
            "neither a variable question nor a purpose question can be generated",
        )

    if not questions:
        raise GenerationError("NothingToAsk", "no questions could be generated")
    return Questionnaire(questionnaire_id, source_hash, seed, tuple(questions))


def generate_from_program(program: t.Program, seed: int) -> Questionnaire:
    """Analyze and generate in one step."""
    from .analysis import classify_identifiers, classify_purposes, except_sources

    return generate_questionnaire(
        program,
        classify_identifiers(program),
        except_sources(program),
        classify_purposes(program),
        seed,
    )


# --- serialization -----------------------------------------------------------

def option_to_dict(option: AnswerOption, redacted: bool) -> dict:
    data: dict = {"id": option.id, "label": option.label}
    if not redacted:
        data["isCorrect"] = option.is_correct
        data["category"] = option.category.value
        data["explanation"] = option.explanation
    return data


def qlc_to_dict(qlc: Qlc, redacted: bool) -> dict:
    data: dict = {
        "id": qlc.id,
        "type": SHORT_TYPE_NAMES[qlc.type],
        "prompt": qlc.prompt,
        "multiSelect": qlc.multi_select,
        "options": [option_to_dict(o, redacted) for o in qlc.options],
    }
    if qlc.target_line is not None:
        data["targetLine"] = qlc.target_line
    if not redacted:
        data["blockModel"] = BLOCK_MODEL_TAGS[qlc.type]
        if qlc.variant is not None:
            data["variant"] = qlc.variant
    return data


def questionnaire_to_dict(questionnaire: Questionnaire, redacted: bool) -> dict:
    data: dict = {
        "id": questionnaire.id,
        "questions": [qlc_to_dict(q, redacted) for q in questionnaire.questions],
    }
    if not redacted:
        data["sourceHash"] = questionnaire.source_hash
        data["seed"] = questionnaire.seed
    return data


def questionnaire_to_json(questionnaire: Questionnaire, redacted: bool, pretty: bool = False) -> str:
    data = questionnaire_to_dict(questionnaire, redacted)
    if pretty:
        return json.dumps(data, indent=2, sort_keys=True)
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def questionnaire_from_dict(data: dict) -> Questionnaire:
    """Rebuild a questionnaire from its instructor-form dictionary."""
    try:
        questions = []
        for q in data["questions"]:
            qlc_type = {v: k for k, v in SHORT_TYPE_NAMES.items()}[q["type"]]
            options = tuple(
                AnswerOption(
                    o["id"], o["label"], o["isCorrect"],
                    OptionCategory(o["category"]), o["explanation"],
                )
                for o in q["options"]
            )
            questions.append(
                Qlc(
                    q["id"], qlc_type, q["prompt"], options, q["multiSelect"],
                    target_line=q.get("targetLine"), variant=q.get("variant"),
                )
            )
        return Questionnaire(data["id"], data["sourceHash"], data["seed"], tuple(questions))
    except (KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"malformed questionnaire JSON: {exc}") from exc
