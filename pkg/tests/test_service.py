import json
import threading

import pytest
from fastapi.testclient import TestClient

from qlc.service import create_app

EXERCISES_DIR = "exercises"


@pytest.fixture()
def app(tmp_path):
    return create_app(tmp_path / "data", exercises_dir=EXERCISES_DIR, seed_salt="test-salt")


@pytest.fixture()
def client(app):
    return TestClient(app)


def submit(client, source, session_id="sess-1"):
    return client.post(
        "/api/exercises/rainfall/submissions",
        json={"sessionId": session_id, "source": source},
    )


def open_questionnaire(client, session_id="sess-1"):
    return client.post(f"/api/sessions/{session_id}/questionnaire")


def correct_answers_from_log(tmp_path):
    """Read the instructor form out of the event log to answer correctly."""
    events = [
        json.loads(line)
        for line in (tmp_path / "data" / "events.jsonl").read_text().splitlines()
    ]
    opened = next(e for e in events if e["kind"] == "QuestionnaireOpened")
    questionnaire = opened["payload"]["questionnaire"]
    return {
        q["id"]: sorted(o["id"] for o in q["options"] if o["isCorrect"])
        for q in questionnaire["questions"]
    }


def test_submit_reference(client, reference_source):
    response = submit(client, reference_source)
    assert response.status_code == 200
    body = response.json()
    assert body["programPoints"] == 95
    assert body["submissionsRemaining"] == 9
    assert len(body["testResults"]) == 4
    assert all(r["passed"] for r in body["testResults"])


def test_unknown_exercise_404(client, reference_source):
    response = client.post(
        "/api/exercises/quicksort/submissions",
        json={"sessionId": "s", "source": reference_source},
    )
    assert response.status_code == 404


def test_submission_limit_409(client, reference_source):
    for i in range(10):
        assert submit(client, reference_source).status_code == 200
    response = submit(client, reference_source)
    assert response.status_code == 409


def test_parse_error_is_422_but_still_recorded(client):
    response = submit(client, "this is not a program ???")
    assert response.status_code == 422
    body = response.json()
    assert body["submissionsRemaining"] == 9
    assert body["programPoints"] == 0
    # the failed submission still counts against the limit
    view = client.get("/api/sessions/sess-1").json()
    assert view["submissionsRemaining"] == 9


def test_open_before_submit_409(client):
    submit(client, "x = 1\n", session_id="other")  # create a different session
    response = open_questionnaire(client, "other2")
    assert response.status_code == 404  # unknown session
    response = open_questionnaire(client, "other")
    assert response.status_code == 200


def test_open_unknown_session_404(client):
    assert open_questionnaire(client, "ghost").status_code == 404


def test_student_form_is_redacted_and_idempotent(client, reference_source):
    submit(client, reference_source)
    first = open_questionnaire(client)
    assert first.status_code == 200
    body = first.json()
    assert body["answered"] is False
    assert len(body["questions"]) == 3
    text = first.text
    assert "isCorrect" not in text
    assert "explanation" not in text
    second = open_questionnaire(client)
    assert second.status_code == 200
    assert second.json() == body


def test_full_flow_with_grading(client, reference_source, tmp_path):
    submit(client, reference_source)
    questionnaire = open_questionnaire(client).json()
    answers = correct_answers_from_log(tmp_path)
    response = client.post(
        f"/api/questionnaires/{questionnaire['id']}/answers", json={"answers": answers}
    )
    assert response.status_code == 200
    report = response.json()
    assert report["qlcPoints"] == 5
    assert report["totalPoints"] == 100
    assert all(q["correct"] for q in report["perQuestion"])
    assert report["explanations"]

    # one-shot: a second grade attempt is rejected
    again = client.post(
        f"/api/questionnaires/{questionnaire['id']}/answers", json={"answers": answers}
    )
    assert again.status_code == 409

    # the questionnaire endpoint now replays the answered state
    view = open_questionnaire(client).json()
    assert view["answered"] is True
    assert view["gradeReport"]["qlcPoints"] == 5


def test_bogus_option_400(client, reference_source, tmp_path):
    submit(client, reference_source)
    questionnaire = open_questionnaire(client).json()
    answers = correct_answers_from_log(tmp_path)
    answers[list(answers)[0]] = ["bogus-option"]
    response = client.post(
        f"/api/questionnaires/{questionnaire['id']}/answers", json={"answers": answers}
    )
    assert response.status_code == 400


def test_unknown_questionnaire_404(client):
    response = client.post("/api/questionnaires/nope/answers", json={"answers": {}})
    assert response.status_code == 404


def test_analytics_empty(client):
    response = client.get("/api/analytics/exercises/rainfall")
    assert response.status_code == 200
    body = response.json()
    assert body["answeredSessions"] == 0
    assert body["successRates"] == {}


def test_analytics_with_sessions_and_course_points(client, reference_source, corpus_sources, tmp_path):
    sources = list(corpus_sources.values())[:4]
    for index, source in enumerate(sources):
        session_id = f"sess-{index}"
        submit(client, source, session_id=session_id)
        questionnaire = open_questionnaire(client, session_id).json()
        events = [
            json.loads(line)
            for line in (tmp_path / "data" / "events.jsonl").read_text().splitlines()
        ]
        opened = next(
            e for e in events
            if e["kind"] == "QuestionnaireOpened" and e["payload"]["sessionId"] == session_id
        )
        answers = {
            q["id"]: sorted(o["id"] for o in q["options"] if o["isCorrect"])
            for q in opened["payload"]["questionnaire"]["questions"]
        }
        if index == 0:  # one student answers a single-choice question wrong
            q_single = next(
                q for q in opened["payload"]["questionnaire"]["questions"] if not q["multiSelect"]
            )
            wrong = next(o["id"] for o in q_single["options"] if not o["isCorrect"])
            answers[q_single["id"]] = [wrong]
        response = client.post(
            f"/api/questionnaires/{questionnaire['id']}/answers", json={"answers": answers}
        )
        assert response.status_code == 200

    body = client.get("/api/analytics/exercises/rainfall").json()
    assert body["answeredSessions"] == 4
    assert body["successRates"]["Q1"]["display"] == "100%"
    assert body["errorCategories"]

    # ingest course points; comparisons appear once both groups have them
    csv_body = "sessionId,points\n" + "\n".join(f"sess-{i},{5000 + 100 * i}" for i in range(4))
    response = client.post("/api/analytics/course-points", content=csv_body)
    assert response.status_code == 200
    assert response.json()["rowsAccepted"] == 4

    body = client.get("/api/analytics/exercises/rainfall").json()
    assert body["groupComparisons"]
    for comparison in body["groupComparisons"].values():
        assert {"U", "pTwoSided", "cles", "nT", "nF"} <= set(comparison)


def test_course_points_csv_validation(client):
    assert client.post("/api/analytics/course-points", content="sessionId,points\n").json() == {
        "rowsAccepted": 0
    }
    assert client.post("/api/analytics/course-points", content="a,1\nb,2\n").json() == {
        "rowsAccepted": 2
    }
    response = client.post("/api/analytics/course-points", content="a,notanumber\n")
    assert response.status_code == 400


def test_crash_replay_reproduces_state(tmp_path, reference_source):
    data_dir = tmp_path / "data"
    app = create_app(data_dir, exercises_dir=EXERCISES_DIR, seed_salt="test-salt")
    client = TestClient(app)
    submit(client, reference_source)
    questionnaire = open_questionnaire(client).json()
    answers = correct_answers_from_log(tmp_path)
    client.post(f"/api/questionnaires/{questionnaire['id']}/answers", json={"answers": answers})
    view_before = client.get("/api/sessions/sess-1").json()

    # simulate a crash: build a brand-new app over the same data directory
    revived = TestClient(create_app(data_dir, exercises_dir=EXERCISES_DIR, seed_salt="test-salt"))
    view_after = revived.get("/api/sessions/sess-1").json()
    assert view_after == view_before

    # the one-shot state survives the restart
    response = revived.post(
        f"/api/questionnaires/{questionnaire['id']}/answers", json={"answers": answers}
    )
    assert response.status_code == 409
    # and the questionnaire did not regenerate
    assert revived.post("/api/sessions/sess-1/questionnaire").json()["id"] == questionnaire["id"]


def test_replay_tolerates_torn_tail_write(tmp_path, reference_source):
    data_dir = tmp_path / "data"
    client = TestClient(create_app(data_dir, exercises_dir=EXERCISES_DIR, seed_salt="s"))
    submit(client, reference_source)
    log_path = data_dir / "events.jsonl"
    with open(log_path, "a", encoding="utf-8") as handle:
        handle.write('{"seq": 99, "kind": "SubmissionAdd')  # torn write
    revived = TestClient(create_app(data_dir, exercises_dir=EXERCISES_DIR, seed_salt="s"))
    view = revived.get("/api/sessions/sess-1").json()
    assert view["submissionsRemaining"] == 9


def test_concurrent_grading_single_winner(tmp_path, reference_source):
    data_dir = tmp_path / "data"
    app = create_app(data_dir, exercises_dir=EXERCISES_DIR, seed_salt="test-salt")
    client = TestClient(app)
    submit(client, reference_source)
    questionnaire = open_questionnaire(client).json()
    answers = correct_answers_from_log(tmp_path)

    statuses = []
    barrier = threading.Barrier(2)

    def grade():
        barrier.wait()
        response = client.post(
            f"/api/questionnaires/{questionnaire['id']}/answers", json={"answers": answers}
        )
        statuses.append(response.status_code)

    threads = [threading.Thread(target=grade) for _ in range(2)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()
    assert sorted(statuses) == [200, 409]


def test_seed_salt_changes_questionnaire(tmp_path, reference_source):
    ids = []
    for salt in ("salt-a", "salt-b"):
        client = TestClient(
            create_app(tmp_path / f"data-{salt}", exercises_dir=EXERCISES_DIR, seed_salt=salt)
        )
        submit(client, reference_source)
        ids.append(open_questionnaire(client).json()["id"])
    assert ids[0] != ids[1]
