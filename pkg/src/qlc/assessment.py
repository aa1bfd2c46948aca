"""Exercise lifecycle: functional tests, points, submission limits and
one-shot questionnaire grading.

A session accumulates submissions against one exercise.  Each submission
runs the exercise's functional tests in the interpreter and earns program
points proportional to the pass count.  After at least one submission the
session may open its questionnaire exactly once; the questionnaire is
generated from the latest submission at that moment and locked to its
content hash.  Answers are graded exactly once, all questions at a time;
full per-option explanations are released only in the grade report.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import tree as t
from .generation import (
    GenerationError,
    OptionCategory,
    Qlc,
    QlcType,
    Questionnaire,
    SHORT_TYPE_NAMES,
    generate_from_program,
    program_hash,
)
from .interpreter import (
    DEFAULT_STEP_LIMIT,
    ExecTrace,
    FaultKind,
    IoScript,
    call_function,
    execute,
)
from .lexer import LexError
from .parser import ParseError, parse_source


class AssessmentError(Exception):
    pass


class LimitExceeded(AssessmentError):
    pass


class NotEligible(AssessmentError):
    pass


class AlreadyOpened(AssessmentError):
    pass


class AlreadyAnswered(AssessmentError):
    pass


class UnknownOption(AssessmentError):
    pass


class MissingAnswer(AssessmentError):
    pass


class InvalidSelection(AssessmentError):
    pass


# --- exercise specification --------------------------------------------------

@dataclass(frozen=True)
class Expectation:
    kind: str  # terminates | noFault | outputNumber | returnedValue
    value: float | None = None
    tolerance: float = 0.0


@dataclass(frozen=True)
class FunctionalTestCase:
    name: str
    input_lines: tuple[str, ...]
    expect: tuple[Expectation, ...]


@dataclass(frozen=True)
class ExerciseSpec:
    id: str
    entry_function: str
    sentinel: int
    max_submissions: int
    program_points_max: int
    qlc_points_max: int
    tests: tuple[FunctionalTestCase, ...]

    def __post_init__(self):
        if self.program_points_max + self.qlc_points_max != 100:
            raise ValueError("program and questionnaire points must total 100")
        if self.max_submissions < 1:
            raise ValueError("max_submissions must be at least 1")


def exercise_spec_from_dict(data: dict) -> ExerciseSpec:
    tests = []
    for raw in data["tests"]:
        raw_expect = raw["expect"]
        if isinstance(raw_expect, dict):
            raw_expect = [raw_expect]
        expect = tuple(
            Expectation(e["kind"], e.get("value"), e.get("tolerance", 0.0))
            for e in raw_expect
        )
        tests.append(FunctionalTestCase(raw["name"], tuple(raw["inputs"]), expect))
    points = data["points"]
    return ExerciseSpec(
        id=data["id"],
        entry_function=data["entryFunction"],
        sentinel=data["sentinel"],
        max_submissions=data["maxSubmissions"],
        program_points_max=points["program"],
        qlc_points_max=points["qlc"],
        tests=tuple(tests),
    )


def load_exercise_spec(path: str | Path) -> ExerciseSpec:
    return exercise_spec_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# --- functional testing -------------------------------------------------------

@dataclass(frozen=True)
class TestResult:
    test_name: str
    passed: bool
    diagnostic: str = ""

    def to_dict(self) -> dict:
        return {"testName": self.test_name, "passed": self.passed, "diagnostic": self.diagnostic}


_NUMBER_RE = re.compile(r"-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?")


def _last_number(lines) -> float | None:
    matches = _NUMBER_RE.findall("\n".join(lines))
    return float(matches[-1]) if matches else None


def _describe_fault(trace: ExecTrace) -> str:
    fault = trace.fault
    assert fault is not None
    return f"{fault.kind.value} at line {fault.line}: {fault.message}"


def _check_expectation(
    exp: Expectation,
    program: t.Program,
    test: FunctionalTestCase,
    spec: ExerciseSpec,
    trace: ExecTrace,
) -> str | None:
    """None if satisfied, else a diagnostic string."""
    if exp.kind == "terminates":
        fault = trace.fault
        if fault is not None and fault.kind is FaultKind.STEP_LIMIT:
            return f"program did not terminate: {_describe_fault(trace)}"
        return None
    if exp.kind == "noFault":
        if trace.fault is not None:
            return f"program failed: {_describe_fault(trace)}"
        return None
    if exp.kind == "outputNumber":
        if trace.fault is not None:
            return f"program failed before producing output: {_describe_fault(trace)}"
        actual = _last_number(trace.stdout)
        if actual is None:
            shown = trace.stdout[-1] if trace.stdout else "(no output)"
            return f"expected a numeric output near {exp.value}, got {shown!r}"
        assert exp.value is not None
        if abs(actual - exp.value) > exp.tolerance:
            return f"expected output {exp.value}, got {actual}"
        return None
    if exp.kind == "returnedValue":
        call_trace = call_function(
            program, spec.entry_function, [], IoScript(test.input_lines), DEFAULT_STEP_LIMIT
        )
        if call_trace.fault is not None:
            return f"{spec.entry_function}() failed: {_describe_fault(call_trace)}"
        result = call_trace.result
        if not isinstance(result, (int, float)) or isinstance(result, bool):
            return f"expected a numeric return value, got {result!r}"
        assert exp.value is not None
        if abs(result - exp.value) > exp.tolerance:
            return f"expected return value {exp.value}, got {result}"
        return None
    raise ValueError(f"unknown expectation kind {exp.kind!r}")


def run_functional_tests(source: str, spec: ExerciseSpec) -> list[TestResult]:
    """Run every test case; a lex/parse error fails all tests with its diagnostic."""
    try:
        program = parse_source(source)
    except (LexError, ParseError) as exc:
        diagnostic = f"does not parse: {exc}"
        return [TestResult(test.name, False, diagnostic) for test in spec.tests]

    results = []
    for test in spec.tests:
        trace = execute(program, IoScript(test.input_lines), DEFAULT_STEP_LIMIT)
        diagnostic = None
        for exp in test.expect:
            diagnostic = _check_expectation(exp, program, test, spec, trace)
            if diagnostic is not None:
                break
        results.append(TestResult(test.name, diagnostic is None, diagnostic or ""))
    return results


def program_points(results: list[TestResult], spec: ExerciseSpec) -> int:
    passed = sum(1 for r in results if r.passed)
    return round(spec.program_points_max * passed / len(spec.tests))


# --- session state -------------------------------------------------------------

@dataclass
class SubmissionRecord:
    submission_id: str
    session_id: str
    source: str
    test_results: list[TestResult]
    program_points: int
    timestamp: float

    def to_dict(self) -> dict:
        return {
            "submissionId": self.submission_id,
            "sessionId": self.session_id,
            "source": self.source,
            "testResults": [r.to_dict() for r in self.test_results],
            "programPoints": self.program_points,
            "timestamp": self.timestamp,
        }

    @staticmethod
    def from_dict(data: dict) -> "SubmissionRecord":
        return SubmissionRecord(
            submission_id=data["submissionId"],
            session_id=data["sessionId"],
            source=data["source"],
            test_results=[
                TestResult(r["testName"], r["passed"], r.get("diagnostic", ""))
                for r in data["testResults"]
            ],
            program_points=data["programPoints"],
            timestamp=data["timestamp"],
        )


@dataclass
class QuestionnaireState:
    questionnaire: Questionnaire
    opened_at_submission_id: str
    answered: bool = False
    answers: dict[str, list[str]] | None = None
    qlc_points: int = 0


@dataclass
class SessionState:
    session_id: str
    exercise_id: str
    submissions: list[SubmissionRecord] = field(default_factory=list)
    questionnaire: QuestionnaireState | None = None
    grade_report: "GradeReport | None" = None

    @property
    def best_program_points(self) -> int:
        return max((s.program_points for s in self.submissions), default=0)

    @property
    def qlc_points(self) -> int:
        return self.questionnaire.qlc_points if self.questionnaire else 0

    @property
    def total_points(self) -> int:
        return self.best_program_points + self.qlc_points


# --- grading --------------------------------------------------------------------

ERROR_CATEGORIES = {
    OptionCategory.BUILTIN_USED: "selectedBuiltin",
    OptionCategory.RESERVED_WORD: "selectedReserved",
    OptionCategory.UNUSED_WORD: "selectedUnused",
    OptionCategory.TRY_LINE: "choseTryLine",
    OptionCategory.OUTSIDE_BEFORE_TRY: "choseOutsideBefore",
}


@dataclass(frozen=True)
class QuestionGrade:
    question_id: str
    qlc_type: QlcType
    variant: str | None
    correct: bool
    selected_option_ids: tuple[str, ...]
    error_categories: frozenset[str]

    def to_dict(self) -> dict:
        return {
            "questionId": self.question_id,
            "qlcType": SHORT_TYPE_NAMES[self.qlc_type],
            "variant": self.variant,
            "correct": self.correct,
            "selectedOptionIds": list(self.selected_option_ids),
            "errorCategories": sorted(self.error_categories),
        }


@dataclass(frozen=True)
class GradeReport:
    per_question: tuple[QuestionGrade, ...]
    qlc_points: int
    explanations: dict[str, dict]  # option id -> {label, isCorrect, explanation}

    def to_dict(self) -> dict:
        return {
            "perQuestion": [q.to_dict() for q in self.per_question],
            "qlcPoints": self.qlc_points,
            "explanations": self.explanations,
        }

    @staticmethod
    def from_dict(data: dict) -> "GradeReport":
        type_by_name = {v: k for k, v in SHORT_TYPE_NAMES.items()}
        per_question = tuple(
            QuestionGrade(
                q["questionId"],
                type_by_name[q["qlcType"]],
                q.get("variant"),
                q["correct"],
                tuple(q["selectedOptionIds"]),
                frozenset(q["errorCategories"]),
            )
            for q in data["perQuestion"]
        )
        return GradeReport(per_question, data["qlcPoints"], data["explanations"])


def _grade_question(qlc: Qlc, selected: list[str]) -> QuestionGrade:
    option_ids = {o.id for o in qlc.options}
    for option_id in selected:
        if option_id not in option_ids:
            raise UnknownOption(f"option {option_id!r} does not belong to question {qlc.id}")
    if not selected:
        raise MissingAnswer(f"question {qlc.id} has no selection")
    if not qlc.multi_select and len(selected) != 1:
        raise InvalidSelection(f"question {qlc.id} takes exactly one selection")
    if len(set(selected)) != len(selected):
        raise InvalidSelection(f"question {qlc.id} has duplicate selections")

    selected_set = set(selected)
    correct_set = qlc.correct_option_ids
    correct = selected_set == correct_set

    categories: set[str] = set()
    if not correct:
        by_id = {o.id: o for o in qlc.options}
        if qlc.type is QlcType.VARIABLE_NAMES:
            if correct_set - selected_set:
                categories.add("missedVariable")
            for option_id in selected_set - correct_set:
                category = ERROR_CATEGORIES.get(by_id[option_id].category)
                if category:
                    categories.add(category)
        elif qlc.type is QlcType.EXCEPT_SOURCE:
            for option_id in selected_set:
                category = ERROR_CATEGORIES.get(by_id[option_id].category)
                if category:
                    categories.add(category)
        else:
            categories.add("wrongPurposeLabel")
    return QuestionGrade(
        qlc.id, qlc.type, qlc.variant, correct, tuple(selected), frozenset(categories)
    )


def grade_questionnaire(
    questionnaire: Questionnaire,
    answers: dict[str, list[str]],
    qlc_points_max: int,
) -> GradeReport:
    """Grade a full answer set against a questionnaire (stateless)."""
    known_ids = {q.id for q in questionnaire.questions}
    for question_id in answers:
        if question_id not in known_ids:
            raise UnknownOption(f"question {question_id!r} is not part of this questionnaire")
    grades = []
    for qlc in questionnaire.questions:
        if qlc.id not in answers:
            raise MissingAnswer(f"question {qlc.id} was not answered")
        grades.append(_grade_question(qlc, list(answers[qlc.id])))
    all_correct = all(g.correct for g in grades)
    explanations = {
        option.id: {
            "label": option.label,
            "isCorrect": option.is_correct,
            "explanation": option.explanation,
        }
        for qlc in questionnaire.questions
        for option in qlc.options
    }
    return GradeReport(tuple(grades), qlc_points_max if all_correct else 0, explanations)


# --- lifecycle operations ---------------------------------------------------------

def submit(session: SessionState, spec: ExerciseSpec, source: str,
           timestamp: float | None = None) -> SubmissionRecord:
    """Run the tests for a new submission and append its record to the session."""
    if len(session.submissions) >= spec.max_submissions:
        raise LimitExceeded(
            f"submission limit of {spec.max_submissions} reached for session {session.session_id}"
        )
    results = run_functional_tests(source, spec)
    record = SubmissionRecord(
        submission_id=f"{session.session_id}-s{len(session.submissions) + 1}",
        session_id=session.session_id,
        source=source,
        test_results=results,
        program_points=program_points(results, spec),
        timestamp=time.time() if timestamp is None else timestamp,
    )
    session.submissions.append(record)
    return record


def open_questionnaire(session: SessionState, spec: ExerciseSpec, seed: int) -> QuestionnaireState:
    """Generate the session's questionnaire from its latest submission."""
    if not session.submissions:
        raise NotEligible("open the questionnaire after submitting the program at least once")
    if session.questionnaire is not None:
        raise AlreadyOpened(f"session {session.session_id} already opened its questionnaire")
    latest = session.submissions[-1]
    try:
        program = parse_source(latest.source)
    except (LexError, ParseError) as exc:
        raise GenerationError("NothingToAsk", f"latest submission does not parse: {exc}") from exc
    questionnaire = generate_from_program(program, seed)
    state = QuestionnaireState(questionnaire, latest.submission_id)
    session.questionnaire = state
    return state


def grade_answers(session: SessionState, spec: ExerciseSpec,
                  answers: dict[str, list[str]]) -> GradeReport:
    """One-shot grading of the session's questionnaire; state is locked afterwards."""
    state = session.questionnaire
    if state is None:
        raise NotEligible("questionnaire has not been opened")
    if state.answered:
        raise AlreadyAnswered(f"session {session.session_id} already answered its questionnaire")
    report = grade_questionnaire(state.questionnaire, answers, spec.qlc_points_max)
    state.answered = True
    state.answers = {k: list(v) for k, v in answers.items()}
    state.qlc_points = report.qlc_points
    session.grade_report = report
    return report


def source_content_hash(source: str) -> str:
    """Program content hash of raw source text (must parse)."""
    return program_hash(parse_source(source))
