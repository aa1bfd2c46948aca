import pytest

from qlc.assessment import (
    AlreadyAnswered,
    AlreadyOpened,
    InvalidSelection,
    LimitExceeded,
    MissingAnswer,
    NotEligible,
    SessionState,
    UnknownOption,
    grade_answers,
    open_questionnaire,
    program_points,
    run_functional_tests,
    submit,
)
from qlc.generation import QlcType


def make_session(n=1):
    return SessionState(f"session-{n}", "rainfall")


def correct_answers(questionnaire):
    return {q.id: sorted(q.correct_option_ids) for q in questionnaire.questions}


def test_reference_passes_all_tests(reference_source, rainfall_spec):
    results = run_functional_tests(reference_source, rainfall_spec)
    assert all(r.passed for r in results)
    assert program_points(results, rainfall_spec) == 95


def test_no_try_mutant_fails_exactly_t2_t3(mutant_sources, rainfall_spec):
    results = run_functional_tests(mutant_sources["no_try"], rainfall_spec)
    failed = {r.test_name for r in results if not r.passed}
    assert failed == {"T2_survives_letters", "T3_ignores_unparseable"}
    assert program_points(results, rainfall_spec) == 48


def test_empty_source_fails_all_with_parse_diagnostic(rainfall_spec):
    results = run_functional_tests("", rainfall_spec)
    assert len(results) == 4
    for result in results:
        assert not result.passed
        assert "does not parse" in result.diagnostic
    assert program_points(results, rainfall_spec) == 0


def test_partial_points_follow_rounding(rainfall_spec):
    # passed counts 0..4 map to the documented point steps
    steps = [round(95 * k / 4) for k in range(5)]
    assert steps == [0, 24, 48, 71, 95]


def test_submit_appends_and_scores(reference_source, rainfall_spec):
    session = make_session()
    record = submit(session, rainfall_spec, reference_source)
    assert record.program_points == 95
    assert session.best_program_points == 95
    assert len(session.submissions) == 1
    assert record.submission_id == "session-1-s1"


def test_submission_limit(reference_source, rainfall_spec):
    session = make_session()
    for _ in range(rainfall_spec.max_submissions):
        submit(session, rainfall_spec, reference_source)
    with pytest.raises(LimitExceeded):
        submit(session, rainfall_spec, reference_source)
    assert len(session.submissions) == 10


def test_best_points_survive_worse_resubmission(reference_source, mutant_sources, rainfall_spec):
    session = make_session()
    submit(session, rainfall_spec, reference_source)
    submit(session, rainfall_spec, mutant_sources["no_try"])
    assert session.best_program_points == 95
    assert session.submissions[-1].program_points == 48


def test_open_requires_submission(rainfall_spec):
    with pytest.raises(NotEligible):
        open_questionnaire(make_session(), rainfall_spec, seed=1)


def test_open_generates_three_questions(reference_source, rainfall_spec):
    session = make_session()
    submit(session, rainfall_spec, reference_source)
    state = open_questionnaire(session, rainfall_spec, seed=1)
    assert len(state.questionnaire.questions) == 3
    assert state.opened_at_submission_id == "session-1-s1"


def test_second_open_rejected(reference_source, rainfall_spec):
    session = make_session()
    submit(session, rainfall_spec, reference_source)
    open_questionnaire(session, rainfall_spec, seed=1)
    with pytest.raises(AlreadyOpened):
        open_questionnaire(session, rainfall_spec, seed=2)


def test_questionnaire_targets_latest_submission(reference_source, corpus_sources, rainfall_spec):
    session = make_session()
    submit(session, rainfall_spec, reference_source)
    submit(session, rainfall_spec, corpus_sources["c02_validate_no_try.py"])
    state = open_questionnaire(session, rainfall_spec, seed=1)
    # latest program has no try/except, so no exception question
    assert [q.type for q in state.questionnaire.questions] == [
        QlcType.VARIABLE_NAMES, QlcType.LINE_PURPOSE,
    ]


def graded_session(reference_source, rainfall_spec):
    session = make_session()
    submit(session, rainfall_spec, reference_source)
    state = open_questionnaire(session, rainfall_spec, seed=1)
    return session, state.questionnaire


def test_all_correct_awards_five_points(reference_source, rainfall_spec):
    session, questionnaire = graded_session(reference_source, rainfall_spec)
    report = grade_answers(session, rainfall_spec, correct_answers(questionnaire))
    assert report.qlc_points == 5
    assert all(g.correct for g in report.per_question)
    assert all(not g.error_categories for g in report.per_question)
    assert session.total_points == 100


def test_missed_variable_category(reference_source, rainfall_spec):
    session, questionnaire = graded_session(reference_source, rainfall_spec)
    answers = correct_answers(questionnaire)
    q1 = next(q for q in questionnaire.questions if q.type is QlcType.VARIABLE_NAMES)
    value_id = next(o.id for o in q1.options if o.label == "value")
    answers[q1.id] = [i for i in answers[q1.id] if i != value_id]
    report = grade_answers(session, rainfall_spec, answers)
    grade = next(g for g in report.per_question if g.qlc_type is QlcType.VARIABLE_NAMES)
    assert not grade.correct
    assert grade.error_categories == {"missedVariable"}
    assert report.qlc_points == 0


def test_try_line_category(reference_source, rainfall_spec):
    session, questionnaire = graded_session(reference_source, rainfall_spec)
    answers = correct_answers(questionnaire)
    q2 = next(q for q in questionnaire.questions if q.type is QlcType.EXCEPT_SOURCE)
    try_id = next(o.id for o in q2.options if o.label == "line 8")
    answers[q2.id] = [try_id]
    report = grade_answers(session, rainfall_spec, answers)
    grade = next(g for g in report.per_question if g.qlc_type is QlcType.EXCEPT_SOURCE)
    assert grade.error_categories == {"choseTryLine"}


def test_selected_distractor_categories(reference_source, rainfall_spec):
    session, questionnaire = graded_session(reference_source, rainfall_spec)
    answers = correct_answers(questionnaire)
    q1 = next(q for q in questionnaire.questions if q.type is QlcType.VARIABLE_NAMES)
    distractors = [o for o in q1.options if not o.is_correct]
    answers[q1.id] = answers[q1.id] + [distractors[0].id]
    report = grade_answers(session, rainfall_spec, answers)
    grade = next(g for g in report.per_question if g.qlc_type is QlcType.VARIABLE_NAMES)
    assert grade.error_categories <= {"selectedBuiltin", "selectedReserved", "selectedUnused"}
    assert len(grade.error_categories) == 1


def test_wrong_purpose_category(reference_source, rainfall_spec):
    session, questionnaire = graded_session(reference_source, rainfall_spec)
    answers = correct_answers(questionnaire)
    q3 = next(q for q in questionnaire.questions if q.type is QlcType.LINE_PURPOSE)
    wrong = next(o.id for o in q3.options if not o.is_correct)
    answers[q3.id] = [wrong]
    report = grade_answers(session, rainfall_spec, answers)
    grade = next(g for g in report.per_question if g.qlc_type is QlcType.LINE_PURPOSE)
    assert grade.error_categories == {"wrongPurposeLabel"}


def test_one_shot_grading(reference_source, rainfall_spec):
    session, questionnaire = graded_session(reference_source, rainfall_spec)
    answers = correct_answers(questionnaire)
    grade_answers(session, rainfall_spec, answers)
    points_before = session.total_points
    with pytest.raises(AlreadyAnswered):
        grade_answers(session, rainfall_spec, answers)
    assert session.total_points == points_before


def test_grading_before_open_rejected(reference_source, rainfall_spec):
    session = make_session()
    submit(session, rainfall_spec, reference_source)
    with pytest.raises(NotEligible):
        grade_answers(session, rainfall_spec, {})


def test_answer_validation(reference_source, rainfall_spec):
    session, questionnaire = graded_session(reference_source, rainfall_spec)
    good = correct_answers(questionnaire)

    missing = dict(good)
    missing.pop(questionnaire.questions[0].id)
    with pytest.raises(MissingAnswer):
        grade_answers(session, rainfall_spec, missing)

    bogus = dict(good)
    bogus[questionnaire.questions[0].id] = ["nope"]
    with pytest.raises(UnknownOption):
        grade_answers(session, rainfall_spec, bogus)

    q2 = next(q for q in questionnaire.questions if q.type is QlcType.EXCEPT_SOURCE)
    doubled = dict(good)
    doubled[q2.id] = [o.id for o in q2.options[:2]]
    with pytest.raises(InvalidSelection):
        grade_answers(session, rainfall_spec, doubled)

    # validation failures must not consume the one-shot attempt
    report = grade_answers(session, rainfall_spec, good)
    assert report.qlc_points == 5


def test_explanations_released_in_report(reference_source, rainfall_spec):
    session, questionnaire = graded_session(reference_source, rainfall_spec)
    report = grade_answers(session, rainfall_spec, correct_answers(questionnaire))
    option_ids = {o.id for q in questionnaire.questions for o in q.options}
    assert set(report.explanations) == option_ids
    for entry in report.explanations.values():
        assert entry["explanation"].strip()
        assert isinstance(entry["isCorrect"], bool)


def test_resubmission_after_answering_is_allowed(reference_source, mutant_sources, rainfall_spec):
    session, questionnaire = graded_session(reference_source, rainfall_spec)
    grade_answers(session, rainfall_spec, correct_answers(questionnaire))
    submit(session, rainfall_spec, mutant_sources["no_try"])
    assert session.total_points == 100  # best program points + questionnaire points


def test_points_capped_at_100(reference_source, rainfall_spec, corpus_sources):
    for source in corpus_sources.values():
        session = make_session()
        submit(session, rainfall_spec, source)
        state = open_questionnaire(session, rainfall_spec, seed=3)
        grade_answers(session, rainfall_spec, correct_answers(state.questionnaire))
        assert session.total_points <= 100
