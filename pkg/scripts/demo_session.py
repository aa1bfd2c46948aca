#!/usr/bin/env python3
"""Walk one session through the whole lifecycle, in process.

Submits the reference rainfall solution, opens the questionnaire, prints
the student view, answers everything correctly and prints the grade
report. Useful as a smoke test and as documentation of the data shapes.
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from qlc.assessment import SessionState, grade_answers, load_exercise_spec, open_questionnaire, submit
from qlc.generation import questionnaire_to_dict


def main() -> int:
    spec = load_exercise_spec(ROOT / "exercises" / "rainfall.json")
    source = (ROOT / "fixtures" / "rainfall_reference.py").read_text(encoding="utf-8")

    session = SessionState("demo", spec.id)
    record = submit(session, spec, source)
    print(f"submitted: {record.submission_id}, program points {record.program_points}")
    for result in record.test_results:
        marker = "ok " if result.passed else "FAIL"
        print(f"  [{marker}] {result.test_name} {result.diagnostic}")

    state = open_questionnaire(session, spec, seed=2024)
    print("\nstudent view of the questionnaire:")
    print(json.dumps(questionnaire_to_dict(state.questionnaire, redacted=True), indent=2))

    answers = {q.id: sorted(q.correct_option_ids) for q in state.questionnaire.questions}
    report = grade_answers(session, spec, answers)
    print(f"\nanswered all questions correctly: +{report.qlc_points} points")
    print(f"session total: {session.total_points} / 100")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
