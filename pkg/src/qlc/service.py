"""HTTP facade over the assessment engine with durable persistence.

Endpoints:

* ``POST /api/exercises/{exercise_id}/submissions`` — run the tests, award
  program points, enforce the submission limit.
* ``POST /api/sessions/{session_id}/questionnaire`` — open (or re-fetch)
  the session's questionnaire in student form; generation happens once.
* ``POST /api/questionnaires/{questionnaire_id}/answers`` — one-shot
  grading with full explanations in the response.
* ``GET  /api/sessions/{session_id}`` — session view for client restore.
* ``GET  /api/analytics/exercises/{exercise_id}`` — success rates, error
  tallies and (once course points are ingested) group comparisons.
* ``POST /api/analytics/course-points`` — CSV ingest (sessionId,points).

Every mutation is appended to the event log before the response is sent;
restarting the service replays the log and reproduces the same state.
Student-facing payloads never contain correctness flags or explanations
before the session's answers are graded.  Per-session writes serialize on
a session lock, so exactly one request wins any one-shot transition.
"""

from __future__ import annotations

import hashlib
import json
import os
import secrets
import threading
from collections import defaultdict
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import assessment as asm
from . import stats as st
from .eventlog import EventLog
from .generation import GenerationError, questionnaire_from_dict, questionnaire_to_dict
from .parser import parse_diagnostic

SEED_SALT_ENV = "QLC_SEED_SALT"


class SubmitBody(BaseModel):
    sessionId: str
    source: str


class AnswersBody(BaseModel):
    answers: dict[str, list[str]]


class ApiError(Exception):
    def __init__(self, status_code: int, message: str, **extra):
        self.status_code = status_code
        self.message = message
        self.extra = extra


class Engine:
    """Replayed in-memory state plus the event log behind it."""

    def __init__(self, data_dir: str | Path, exercises: dict[str, asm.ExerciseSpec],
                 seed_salt: str | None = None):
        self.data_dir = Path(data_dir)
        self.exercises = exercises
        self.log = EventLog(self.data_dir / "events.jsonl")
        self.seed_salt = seed_salt or os.environ.get(SEED_SALT_ENV) or self._persistent_salt()
        self.sessions: dict[str, asm.SessionState] = {}
        self.questionnaire_sessions: dict[str, str] = {}
        self.course_points: dict[str, float] = {}
        self._locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()
        self._replay()

    def _persistent_salt(self) -> str:
        salt_path = self.data_dir / "seed_salt"
        if salt_path.exists():
            return salt_path.read_text(encoding="utf-8").strip()
        salt = secrets.token_hex(16)
        salt_path.parent.mkdir(parents=True, exist_ok=True)
        salt_path.write_text(salt, encoding="utf-8")
        return salt

    def session_lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks[session_id]

    def derive_seed(self, session_id: str, source_hash: str) -> int:
        digest = hashlib.sha256(
            f"{session_id}|{source_hash}|{self.seed_salt}".encode("utf-8")
        ).digest()
        return int.from_bytes(digest[:8], "big")

    # --- event application -------------------------------------------------

    def _replay(self) -> None:
        for record in self.log.replay():
            self._apply(record.kind, record.payload)

    def _apply(self, kind: str, payload: dict) -> None:
        if kind == "SubmissionAdded":
            session = self._session_for(payload["sessionId"], payload["exerciseId"])
            session.submissions.append(asm.SubmissionRecord.from_dict(payload["record"]))
        elif kind == "QuestionnaireOpened":
            session = self.sessions[payload["sessionId"]]
            questionnaire = questionnaire_from_dict(payload["questionnaire"])
            session.questionnaire = asm.QuestionnaireState(
                questionnaire, payload["openedAtSubmissionId"]
            )
            self.questionnaire_sessions[questionnaire.id] = session.session_id
        elif kind == "AnswersGraded":
            session = self.sessions[payload["sessionId"]]
            state = session.questionnaire
            assert state is not None
            report = asm.GradeReport.from_dict(payload["gradeReport"])
            state.answered = True
            state.answers = payload["answers"]
            state.qlc_points = report.qlc_points
            session.grade_report = report
        elif kind == "CoursePointsIngested":
            for row in payload["rows"]:
                self.course_points[row["sessionId"]] = row["points"]
        else:  # pragma: no cover
            raise ValueError(f"unknown event kind {kind!r}")

    def _session_for(self, session_id: str, exercise_id: str) -> asm.SessionState:
        session = self.sessions.get(session_id)
        if session is None:
            session = asm.SessionState(session_id, exercise_id)
            self.sessions[session_id] = session
        return session

    # --- operations ----------------------------------------------------------

    def submit(self, exercise_id: str, session_id: str, source: str) -> dict:
        spec = self.exercises.get(exercise_id)
        if spec is None:
            raise ApiError(404, f"unknown exercise {exercise_id!r}")
        with self.session_lock(session_id):
            session = self.sessions.get(session_id)
            if session is not None and session.exercise_id != exercise_id:
                raise ApiError(409, "session belongs to a different exercise")
            if session is None:
                session = self._session_for(session_id, exercise_id)
            try:
                record = asm.submit(session, spec, source)
            except asm.LimitExceeded as exc:
                raise ApiError(409, str(exc)) from exc
            self.log.append(
                "SubmissionAdded",
                {
                    "sessionId": session_id,
                    "exerciseId": exercise_id,
                    "record": record.to_dict(),
                },
            )
            body = {
                "submissionId": record.submission_id,
                "testResults": [r.to_dict() for r in record.test_results],
                "programPoints": record.program_points,
                "submissionsRemaining": spec.max_submissions - len(session.submissions),
            }
            diagnostic = parse_diagnostic(source)
            if diagnostic is not None:
                raise ApiError(422, diagnostic, **body)
            return body

    def open_questionnaire(self, session_id: str) -> dict:
        session = self.sessions.get(session_id)
        if session is None:
            raise ApiError(404, f"unknown session {session_id!r}")
        spec = self.exercises[session.exercise_id]
        with self.session_lock(session_id):
            if session.questionnaire is None:
                if not session.submissions:
                    raise ApiError(409, "submit the program before opening the questionnaire")
                latest = session.submissions[-1]
                try:
                    source_hash = asm.source_content_hash(latest.source)
                except Exception as exc:
                    raise ApiError(422, f"latest submission cannot be analyzed: {exc}") from exc
                seed = self.derive_seed(session_id, source_hash)
                try:
                    state = asm.open_questionnaire(session, spec, seed)
                except asm.NotEligible as exc:
                    raise ApiError(409, str(exc)) from exc
                except GenerationError as exc:
                    raise ApiError(422, f"no questionnaire can be generated: {exc}") from exc
                self.log.append(
                    "QuestionnaireOpened",
                    {
                        "sessionId": session_id,
                        "openedAtSubmissionId": state.opened_at_submission_id,
                        "seed": seed,
                        "questionnaire": questionnaire_to_dict(state.questionnaire, redacted=False),
                    },
                )
            return self.questionnaire_view(session)

    def questionnaire_view(self, session: asm.SessionState) -> dict:
        state = session.questionnaire
        assert state is not None
        self.questionnaire_sessions.setdefault(state.questionnaire.id, session.session_id)
        body = questionnaire_to_dict(state.questionnaire, redacted=True)
        body["answered"] = state.answered
        if state.answered and session.grade_report is not None:
            body["gradeReport"] = session.grade_report.to_dict()
            body["answers"] = state.answers
        return body

    def grade(self, questionnaire_id: str, answers: dict[str, list[str]]) -> dict:
        session_id = self.questionnaire_sessions.get(questionnaire_id)
        if session_id is None:
            raise ApiError(404, f"unknown questionnaire {questionnaire_id!r}")
        session = self.sessions[session_id]
        spec = self.exercises[session.exercise_id]
        with self.session_lock(session_id):
            try:
                report = asm.grade_answers(session, spec, answers)
            except asm.AlreadyAnswered as exc:
                raise ApiError(409, str(exc)) from exc
            except (asm.MissingAnswer, asm.UnknownOption, asm.InvalidSelection) as exc:
                raise ApiError(400, str(exc)) from exc
            self.log.append(
                "AnswersGraded",
                {
                    "sessionId": session_id,
                    "answers": {k: list(v) for k, v in answers.items()},
                    "gradeReport": report.to_dict(),
                },
            )
            body = report.to_dict()
            body["totalPoints"] = session.total_points
            return body

    def session_view(self, session_id: str) -> dict:
        session = self.sessions.get(session_id)
        if session is None:
            raise ApiError(404, f"unknown session {session_id!r}")
        spec = self.exercises[session.exercise_id]
        latest = session.submissions[-1] if session.submissions else None
        body: dict = {
            "sessionId": session_id,
            "exerciseId": session.exercise_id,
            "submissionsRemaining": spec.max_submissions - len(session.submissions),
            "bestProgramPoints": session.best_program_points,
            "totalPoints": session.total_points,
            "latestTestResults": [r.to_dict() for r in latest.test_results] if latest else [],
            "latestProgramPoints": latest.program_points if latest else None,
        }
        if session.questionnaire is not None:
            body["questionnaire"] = self.questionnaire_view(session)
        return body

    def ingest_course_points(self, csv_text: str) -> dict:
        rows = []
        for index, raw_line in enumerate(csv_text.splitlines()):
            line = raw_line.strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if index == 0 and parts[0] == "sessionId":
                continue
            if len(parts) < 2:
                raise ApiError(400, f"row {index + 1}: expected sessionId,points")
            try:
                points = float(parts[1])
            except ValueError:
                raise ApiError(400, f"row {index + 1}: non-numeric points {parts[1]!r}") from None
            rows.append({"sessionId": parts[0], "points": points})
        if rows:
            self.log.append("CoursePointsIngested", {"rows": rows})
            for row in rows:
                self.course_points[row["sessionId"]] = row["points"]
        return {"rowsAccepted": len(rows)}

    # --- analytics -------------------------------------------------------------

    def answer_log(self, exercise_id: str) -> st.AnswerLog:
        rows: st.AnswerLog = []
        for session in self.sessions.values():
            if session.exercise_id != exercise_id or session.grade_report is None:
                continue
            for grade in session.grade_report.per_question:
                rows.append(
                    st.AnswerRow(
                        session_id=session.session_id,
                        qlc_type=asm.SHORT_TYPE_NAMES[grade.qlc_type],
                        correct=grade.correct,
                        error_categories=tuple(sorted(grade.error_categories)),
                        course_points=self.course_points.get(session.session_id),
                        variant=grade.variant,
                    )
                )
        return rows

    def analytics(self, exercise_id: str) -> dict:
        if exercise_id not in self.exercises:
            raise ApiError(404, f"unknown exercise {exercise_id!r}")
        log = self.answer_log(exercise_id)
        body: dict = {
            "exerciseId": exercise_id,
            "answeredSessions": len({r.session_id for r in log}),
            "successRates": {},
            "errorCategories": {},
            "groupComparisons": {},
        }
        if not log:
            return body
        for qlc_type, rate in st.success_rates(log).items():
            entry = {
                "correctCount": rate.correct_count,
                "totalCount": rate.total_count,
                "rate": rate.rate,
                "display": rate.display,
            }
            if rate.variants:
                entry["variants"] = {
                    name: {
                        "correctCount": sub.correct_count,
                        "totalCount": sub.total_count,
                        "rate": sub.rate,
                        "display": sub.display,
                    }
                    for name, sub in sorted(rate.variants.items())
                }
            body["successRates"][qlc_type] = entry
        body["errorCategories"] = st.error_category_counts(log)
        for qlc_type in sorted({r.qlc_type for r in log}):
            try:
                comparison = st.compare_by_question(log, qlc_type)
            except st.DegenerateGroups:
                continue
            body["groupComparisons"][qlc_type] = comparison.to_dict()
        return body


def load_exercises(exercises_dir: str | Path) -> dict[str, asm.ExerciseSpec]:
    specs: dict[str, asm.ExerciseSpec] = {}
    for path in sorted(Path(exercises_dir).glob("*.json")):
        spec = asm.load_exercise_spec(path)
        specs[spec.id] = spec
    if not specs:
        raise ValueError(f"no exercise specs found in {exercises_dir}")
    return specs


def create_app(
    data_dir: str | Path,
    exercises_dir: str | Path | None = None,
    exercises: dict[str, asm.ExerciseSpec] | None = None,
    seed_salt: str | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    if exercises is None:
        if exercises_dir is None:
            raise ValueError("either exercises or exercises_dir is required")
        exercises = load_exercises(exercises_dir)
    engine = Engine(data_dir, exercises, seed_salt)
    app = FastAPI(title="qlc assessment service")
    app.state.engine = engine

    @app.exception_handler(ApiError)
    async def handle_api_error(_request: Request, exc: ApiError) -> JSONResponse:
        body = {"error": exc.message}
        body.update(exc.extra)
        return JSONResponse(status_code=exc.status_code, content=body)

    @app.post("/api/exercises/{exercise_id}/submissions")
    def submit(exercise_id: str, body: SubmitBody) -> dict:
        return engine.submit(exercise_id, body.sessionId, body.source)

    @app.post("/api/sessions/{session_id}/questionnaire")
    def open_questionnaire(session_id: str) -> dict:
        return engine.open_questionnaire(session_id)

    @app.get("/api/sessions/{session_id}")
    def session_view(session_id: str) -> dict:
        return engine.session_view(session_id)

    @app.post("/api/questionnaires/{questionnaire_id}/answers")
    def grade(questionnaire_id: str, body: AnswersBody) -> dict:
        return engine.grade(questionnaire_id, body.answers)

    @app.get("/api/analytics/exercises/{exercise_id}")
    def analytics(exercise_id: str) -> dict:
        return engine.analytics(exercise_id)

    @app.post("/api/analytics/course-points")
    async def ingest_course_points(request: Request) -> dict:
        raw = await request.body()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ApiError(400, f"body is not UTF-8: {exc}") from exc
        return engine.ingest_course_points(text)

    @app.get("/api/exercises")
    def list_exercises() -> dict:
        return {
            "exercises": [
                {
                    "id": spec.id,
                    "entryFunction": spec.entry_function,
                    "maxSubmissions": spec.max_submissions,
                    "programPointsMax": spec.program_points_max,
                    "qlcPointsMax": spec.qlc_points_max,
                    "tests": [t.name for t in spec.tests],
                }
                for spec in exercises.values()
            ]
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="static")

    return app
