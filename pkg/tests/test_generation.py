import json

import pytest

from qlc.analysis import classify_identifiers, classify_purposes, except_sources
from qlc.generation import (
    GenerationError,
    OptionCategory,
    PURPOSE_LABELS,
    QlcType,
    UNUSED_WORD_POOL,
    generate_from_program,
    generate_questionnaire,
    questionnaire_to_dict,
    questionnaire_to_json,
    render_prompt,
)
from qlc.parser import parse_source


@pytest.fixture(scope="module")
def reference_program(request):
    return parse_source(request.getfixturevalue("reference_source"))


@pytest.fixture(scope="module")
def reference_questionnaire(reference_program):
    return generate_from_program(reference_program, 7)


def question_of(questionnaire, qlc_type):
    return next(q for q in questionnaire.questions if q.type is qlc_type)


def test_reference_has_three_questions(reference_questionnaire):
    assert [q.type for q in reference_questionnaire.questions] == [
        QlcType.VARIABLE_NAMES, QlcType.EXCEPT_SOURCE, QlcType.LINE_PURPOSE,
    ]


def test_q1_correct_set_and_distractors(reference_questionnaire):
    q1 = question_of(reference_questionnaire, QlcType.VARIABLE_NAMES)
    assert q1.multi_select
    correct_labels = {o.label for o in q1.options if o.is_correct}
    assert correct_labels == {"total", "count", "line", "value"}
    distractors = [o for o in q1.options if not o.is_correct]
    assert len(distractors) == 4
    by_category = {}
    for option in distractors:
        by_category.setdefault(option.category, []).append(option.label)
    assert len(by_category.get(OptionCategory.BUILTIN_USED, [])) <= 2
    assert len(by_category.get(OptionCategory.RESERVED_WORD, [])) <= 2
    for option in distractors:
        assert option.label not in correct_labels


def test_q2_options(reference_questionnaire):
    q2 = question_of(reference_questionnaire, QlcType.EXCEPT_SOURCE)
    assert q2.target_line == 10
    assert q2.prompt == "From which line can program execution jump to line 10?"
    assert not q2.multi_select
    correct = [o for o in q2.options if o.is_correct]
    assert len(correct) == 1
    assert correct[0].label == "line 9"
    categories = {o.category for o in q2.options}
    assert categories == {
        OptionCategory.RAISING_LINE, OptionCategory.TRY_LINE, OptionCategory.OUTSIDE_BEFORE_TRY,
    }
    try_option = next(o for o in q2.options if o.category is OptionCategory.TRY_LINE)
    assert try_option.label == "line 8"
    outside = next(o for o in q2.options if o.category is OptionCategory.OUTSIDE_BEFORE_TRY)
    assert outside.label in {f"line {n}" for n in range(1, 8)}


def test_q3_option_labels(reference_questionnaire):
    q3 = question_of(reference_questionnaire, QlcType.LINE_PURPOSE)
    assert q3.target_line in {5, 6, 12, 16}
    labels = {o.label for o in q3.options}
    assert labels == set(PURPOSE_LABELS.values())
    assert sum(o.is_correct for o in q3.options) == 1
    expected = {
        5: "Accepts new data",
        6: "Is a condition for ending the program",
        12: "Ignores negative input",
        16: "Guards against division by zero",
    }[q3.target_line]
    assert next(o.label for o in q3.options if o.is_correct) == expected


def test_prompt_templates():
    assert render_prompt(QlcType.VARIABLE_NAMES) == (
        "Which of the following are variable names in the program?"
    )
    assert render_prompt(QlcType.EXCEPT_SOURCE, 10) == (
        "From which line can program execution jump to line 10?"
    )
    assert render_prompt(QlcType.LINE_PURPOSE, 5) == (
        "Which of the following best describes the purpose of line 5?"
    )


def test_explanations_are_nonempty_and_categorical(reference_questionnaire):
    for question in reference_questionnaire.questions:
        for option in question.options:
            assert option.explanation.strip()
    q1 = question_of(reference_questionnaire, QlcType.VARIABLE_NAMES)
    for option in q1.options:
        if option.category is OptionCategory.BUILTIN_USED:
            assert "built-in function" in option.explanation
        elif option.category is OptionCategory.RESERVED_WORD:
            assert "reserved word" in option.explanation
        elif option.category is OptionCategory.UNUSED_WORD:
            assert "does not appear" in option.explanation
    q2 = question_of(reference_questionnaire, QlcType.EXCEPT_SOURCE)
    try_option = next(o for o in q2.options if o.category is OptionCategory.TRY_LINE)
    assert try_option.explanation == (
        "This line starts the try block; execution enters the except block "
        "from the line that raises the error."
    )


def test_no_try_program_gets_two_questions(corpus_sources):
    program = parse_source(corpus_sources["c02_validate_no_try.py"])
    questionnaire = generate_from_program(program, 3)
    assert [q.type for q in questionnaire.questions] == [
        QlcType.VARIABLE_NAMES, QlcType.LINE_PURPOSE,
    ]


def test_q2_iff_try_present(corpus_sources):
    for name, source in corpus_sources.items():
        program = parse_source(source)
        questionnaire = generate_from_program(program, 11)
        has_q2 = any(q.type is QlcType.EXCEPT_SOURCE for q in questionnaire.questions)
        assert has_q2 == bool(except_sources(program)), name


def test_byte_identical_determinism(corpus_sources):
    for source in corpus_sources.values():
        program = parse_source(source)
        for seed in (0, 7, 123456789):
            a = questionnaire_to_json(generate_from_program(program, seed), redacted=False)
            b = questionnaire_to_json(generate_from_program(program, seed), redacted=False)
            assert a == b


def test_seeds_change_option_order(reference_program):
    texts = {
        tuple(o.label for o in generate_from_program(reference_program, seed).questions[0].options)
        for seed in range(8)
    }
    assert len(texts) > 1


def test_option_integrity_over_corpus(corpus_sources):
    """Distractors are verifiably wrong under the analysis that produced them."""
    for name, source in corpus_sources.items():
        program = parse_source(source)
        table = classify_identifiers(program)
        flows = except_sources(program)
        purposes = classify_purposes(program)
        questionnaire = generate_questionnaire(program, table, flows, purposes, seed=5)
        for question in questionnaire.questions:
            if question.type is QlcType.VARIABLE_NAMES:
                for option in question.options:
                    assert option.is_correct == (option.label in table.variable_names)
            elif question.type is QlcType.EXCEPT_SOURCE:
                flow = next(f for f in flows if f.handler_line == question.target_line)
                site_lines = {s.line for s in flow.raising_sites}
                for option in question.options:
                    line = int(option.label.split()[-1])
                    if option.is_correct:
                        assert line == min(site_lines)
                    else:
                        assert line not in site_lines
            else:
                finding = next(p for p in purposes if p.line == question.target_line)
                for option in question.options:
                    assert option.is_correct == (option.label == PURPOSE_LABELS[finding.purpose])


def test_student_form_is_redacted(reference_questionnaire):
    student = questionnaire_to_json(reference_questionnaire, redacted=True)
    assert "isCorrect" not in student
    assert "explanation" not in student
    assert "category" not in student
    data = json.loads(student)
    assert set(data) == {"id", "questions"}
    for question in data["questions"]:
        assert set(question) <= {"id", "type", "prompt", "multiSelect", "options", "targetLine"}
        for option in question["options"]:
            assert set(option) == {"id", "label"}


def test_instructor_form_has_answers(reference_questionnaire):
    data = questionnaire_to_dict(reference_questionnaire, redacted=False)
    option = data["questions"][0]["options"][0]
    assert {"id", "label", "isCorrect", "category", "explanation"} <= set(option)
    assert data["sourceHash"] == reference_questionnaire.source_hash


def test_unused_pool_excludes_program_names(reference_questionnaire):
    q1 = question_of(reference_questionnaire, QlcType.VARIABLE_NAMES)
    for option in q1.options:
        if option.category is OptionCategory.UNUSED_WORD:
            assert option.label in UNUSED_WORD_POOL
            assert option.label not in {"total", "count", "line", "value"}


def test_generation_error_when_nothing_to_ask():
    program = parse_source("pass\n")
    with pytest.raises(GenerationError):
        generate_from_program(program, 1)


def test_q1_only_when_no_purposes():
    # a variable exists but no purpose rule matches and there is no try
    program = parse_source("x = 1\ny = x + 2\n")
    questionnaire = generate_from_program(program, 2)
    assert [q.type for q in questionnaire.questions] == [QlcType.VARIABLE_NAMES]
