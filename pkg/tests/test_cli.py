import json

import pytest

from conftest import REPO_ROOT
from qlc.cli import main

REFERENCE = str(REPO_ROOT / "fixtures" / "rainfall_reference.py")
SUITE = str(REPO_ROOT / "exercises" / "rainfall.json")


def run_cli(capsys, *argv):
    main(list(argv))
    return capsys.readouterr().out


def test_parse_json(capsys):
    out = run_cli(capsys, "parse", REFERENCE, "--json")
    data = json.loads(out)
    assert data["kind"] == "Program"


def test_parse_diagnostic_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.py"
    bad.write_text("if x\n    pass\n", encoding="utf-8")
    with pytest.raises(SystemExit) as err:
        main(["parse", str(bad)])
    assert err.value.code == 1
    assert "expected" in capsys.readouterr().err


def test_run_with_stdin_script(tmp_path, capsys):
    script = tmp_path / "inputs.txt"
    script.write_text("1\n2\n-999\n", encoding="utf-8")
    out = run_cli(capsys, "run", REFERENCE, "--stdin-script", str(script))
    assert out.strip() == "1.5"


def test_run_trace_json(tmp_path, capsys):
    script = tmp_path / "inputs.txt"
    script.write_text("abc\n-999\n", encoding="utf-8")
    out = run_cli(capsys, "run", REFERENCE, "--stdin-script", str(script), "--trace-json")
    trace = json.loads(out)
    assert trace["stdout"] == ["0"]
    assert {"event": "raise", "line": 9, "exception": "ValueError"} in trace["events"]


def test_analyze_reports(capsys):
    identifiers = json.loads(run_cli(capsys, "analyze", REFERENCE, "--report", "identifiers"))
    assert {v["name"] for v in identifiers["variables"]} == {"total", "count", "line", "value"}
    exceptions = json.loads(run_cli(capsys, "analyze", REFERENCE, "--report", "exceptions"))
    assert exceptions["flows"][0]["handlerLine"] == 10
    purposes = json.loads(run_cli(capsys, "analyze", REFERENCE, "--report", "purposes"))
    assert {p["line"] for p in purposes["purposes"]} == {5, 6, 12, 16}


def test_generate_forms_differ(capsys):
    instructor = json.loads(run_cli(capsys, "generate", REFERENCE, "--seed", "7", "--json"))
    student = json.loads(run_cli(capsys, "generate", REFERENCE, "--seed", "7", "--student-json"))
    assert "sourceHash" in instructor and "sourceHash" not in student
    assert "isCorrect" in json.dumps(instructor)
    assert "isCorrect" not in json.dumps(student)
    assert instructor["id"] == student["id"]


def test_test_command(capsys):
    out = json.loads(run_cli(capsys, "test", REFERENCE, "--suite", SUITE))
    assert out["passed"] == 4
    assert out["programPoints"] == 95


def test_test_command_failure_exit(tmp_path, capsys):
    mutant = REPO_ROOT / "fixtures" / "mutants" / "no_try.py"
    with pytest.raises(SystemExit) as err:
        main(["test", str(mutant), "--suite", SUITE])
    assert err.value.code == 1
    out = json.loads(capsys.readouterr().out)
    assert out["passed"] == 2


def test_offline_grade_round_trip(tmp_path, capsys):
    instructor = json.loads(run_cli(capsys, "generate", REFERENCE, "--seed", "7", "--json"))
    questionnaire_path = tmp_path / "q.json"
    questionnaire_path.write_text(json.dumps(instructor), encoding="utf-8")
    answers = {
        q["id"]: sorted(o["id"] for o in q["options"] if o["isCorrect"])
        for q in instructor["questions"]
    }
    answers_path = tmp_path / "a.json"
    answers_path.write_text(json.dumps(answers), encoding="utf-8")
    report = json.loads(
        run_cli(capsys, "grade", "--questionnaire", str(questionnaire_path),
                "--answers", str(answers_path))
    )
    assert report["qlcPoints"] == 5
    assert all(q["correct"] for q in report["perQuestion"])


def test_stats_command(tmp_path, capsys):
    log_path = tmp_path / "answers.csv"
    rows = ["sessionId,qlcType,correct,categories,variant"]
    for i in range(6):
        rows.append(f"s{i},Q2,{'true' if i < 4 else 'false'},,")
    log_path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    points_path = tmp_path / "points.csv"
    points_path.write_text(
        "sessionId,points\n" + "\n".join(f"s{i},{4000 + i * 250}" for i in range(6)) + "\n",
        encoding="utf-8",
    )
    out = json.loads(
        run_cli(capsys, "stats", "--log", str(log_path),
                "--course-points", str(points_path), "--question", "Q2")
    )
    assert out["successRates"]["Q2"]["display"] == "67%"
    assert out["comparison"]["nT"] == 4
    assert out["comparison"]["nF"] == 2
    assert 0 <= out["comparison"]["cles"] <= 1
