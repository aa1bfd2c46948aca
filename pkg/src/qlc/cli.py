"""Command-line interface.

Subcommands mirror the engine's layers: ``parse``, ``run``, ``analyze``,
``generate``, ``test``, ``grade``, ``stats`` and ``serve``.  All output is
JSON on stdout; diagnostics go to stderr with exit status 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, stats as st
from . import tree as t
from .assessment import grade_questionnaire, load_exercise_spec, run_functional_tests
from .generation import generate_from_program, questionnaire_from_dict, questionnaire_to_dict
from .interpreter import DEFAULT_STEP_LIMIT, CallEvent, HandleEvent, IoScript, RaiseEvent, execute
from .lexer import LexError
from .parser import ParseError, parse_source


def _read_source(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _print_json(data: object) -> None:
    print(json.dumps(data, indent=2, sort_keys=True))


def _parse_or_exit(path: str) -> t.Program:
    try:
        return parse_source(_read_source(path))
    except (LexError, ParseError) as exc:
        print(f"{path}:{exc}", file=sys.stderr)
        raise SystemExit(1) from exc


def cmd_parse(args: argparse.Namespace) -> None:
    program = _parse_or_exit(args.file)
    if args.json:
        print(t.ast_to_json(program, pretty=True))
    else:
        print(f"{args.file}: parsed {len(program.body)} top-level statements")


def _event_to_dict(event) -> dict:
    if isinstance(event, RaiseEvent):
        return {"event": "raise", "line": event.line, "exception": event.exception_name}
    if isinstance(event, HandleEvent):
        return {"event": "handle", "handlerLine": event.handler_line, "exception": event.exception_name}
    assert isinstance(event, CallEvent)
    return {"event": "call", "function": event.function_name, "line": event.line}


def cmd_run(args: argparse.Namespace) -> None:
    program = _parse_or_exit(args.file)
    input_lines = Path(args.stdin_script).read_text(encoding="utf-8").splitlines()
    trace = execute(program, IoScript(input_lines), args.step_limit)
    fault = trace.fault
    if args.trace_json:
        _print_json(
            {
                "stdout": list(trace.stdout),
                "events": [_event_to_dict(e) for e in trace.events],
                "result": None if fault else trace.result,
                "fault": None if fault is None else {
                    "kind": fault.kind.value, "line": fault.line, "message": fault.message,
                },
                "stepsUsed": trace.steps_used,
            }
        )
    else:
        for line in trace.stdout:
            print(line)
        if fault is not None:
            print(f"{fault.kind.value} at line {fault.line}: {fault.message}", file=sys.stderr)
            raise SystemExit(1)


def cmd_analyze(args: argparse.Namespace) -> None:
    program = _parse_or_exit(args.file)
    if args.report == "identifiers":
        table = analysis.classify_identifiers(program)
        data = {
            "variables": [
                {
                    "name": info.name,
                    "kind": info.kind.value,
                    "definitionSites": [
                        [s.start_line, s.start_col, s.end_line, s.end_col]
                        for s in info.definition_sites
                    ],
                }
                for info in sorted(table.variables.values(), key=lambda v: v.name)
            ],
            "builtinsUsed": sorted(table.builtins_used),
            "keywordsUsed": sorted(table.keywords_used),
            "functionNamesDefined": sorted(table.function_names_defined),
        }
    elif args.report == "exceptions":
        data = {
            "flows": [
                {
                    "tryLine": flow.try_line,
                    "handlerLine": flow.handler_line,
                    "caught": flow.caught,
                    "raisingSites": [
                        {"line": s.line, "exception": s.exception_name, "reason": s.reason.value}
                        for s in flow.raising_sites
                    ],
                }
                for flow in analysis.except_sources(program)
            ]
        }
    else:
        data = {
            "purposes": [
                {"line": p.line, "purpose": p.purpose.value}
                for p in analysis.classify_purposes(program)
            ]
        }
    _print_json(data)


def cmd_generate(args: argparse.Namespace) -> None:
    program = _parse_or_exit(args.file)
    questionnaire = generate_from_program(program, args.seed)
    redacted = bool(args.student_json)
    print(json.dumps(questionnaire_to_dict(questionnaire, redacted=redacted), indent=2, sort_keys=True))


def cmd_test(args: argparse.Namespace) -> None:
    spec = load_exercise_spec(args.suite)
    results = run_functional_tests(_read_source(args.file), spec)
    passed = sum(1 for r in results if r.passed)
    points = round(spec.program_points_max * passed / len(results))
    _print_json(
        {
            "suite": spec.id,
            "results": [r.to_dict() for r in results],
            "passed": passed,
            "total": len(results),
            "programPoints": points,
        }
    )
    if passed < len(results):
        raise SystemExit(1)


def cmd_grade(args: argparse.Namespace) -> None:
    questionnaire_data = json.loads(Path(args.questionnaire).read_text(encoding="utf-8"))
    questionnaire = questionnaire_from_dict(questionnaire_data)
    answers = json.loads(Path(args.answers).read_text(encoding="utf-8"))
    report = grade_questionnaire(questionnaire, answers, args.qlc_points)
    _print_json(report.to_dict())


def cmd_stats(args: argparse.Namespace) -> None:
    log = st.load_answer_log(args.log)
    if args.course_points:
        log = st.merge_course_points(log, st.load_course_points(args.course_points))
    data: dict = {}
    rates = st.success_rates(log)
    data["successRates"] = {
        qlc_type: {
            "correctCount": rate.correct_count,
            "totalCount": rate.total_count,
            "display": rate.display,
            **(
                {"variants": {k: v.display for k, v in sorted(rate.variants.items())}}
                if rate.variants else {}
            ),
        }
        for qlc_type, rate in rates.items()
    }
    data["errorCategories"] = st.error_category_counts(log)
    if args.question:
        comparison = st.compare_by_question(log, args.question)
        data["comparison"] = {
            **comparison.to_dict(),
            "pDisplay": st.format_p(comparison.p_two_sided),
            "clesDisplay": st.format_cles(comparison.cles),
        }
    _print_json(data)


def cmd_serve(args: argparse.Namespace) -> None:
    import uvicorn

    from .service import create_app

    static_dir = args.static_dir
    if static_dir is None:
        default_static = Path("frontend") / "dist"
        if default_static.is_dir():
            static_dir = default_static
    app = create_app(args.data_dir, exercises_dir=args.exercises, static_dir=static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a source file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="print the tree as JSON")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("run", help="execute a program with scripted stdin")
    p.add_argument("file")
    p.add_argument("--stdin-script", required=True, help="file with one input line per input() call")
    p.add_argument("--step-limit", type=int, default=DEFAULT_STEP_LIMIT)
    p.add_argument("--trace-json", action="store_true", help="print the full execution trace as JSON")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("analyze", help="run one static analysis report")
    p.add_argument("file")
    p.add_argument("--report", required=True, choices=["identifiers", "exceptions", "purposes"])
    p.add_argument("--json", action="store_true", help="(output is always JSON)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generate", help="generate the questionnaire for a program")
    p.add_argument("file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--json", action="store_true", help="instructor form with answers")
    p.add_argument("--student-json", action="store_true", help="redacted student form")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("test", help="run an exercise's functional test suite")
    p.add_argument("file")
    p.add_argument("--suite", required=True, help="exercise spec JSON, e.g. exercises/rainfall.json")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("grade", help="grade an answers file against a questionnaire file")
    p.add_argument("--questionnaire", required=True, help="instructor-form questionnaire JSON")
    p.add_argument("--answers", required=True, help='JSON {"questionId": ["optionId", ...]}')
    p.add_argument("--qlc-points", type=int, default=5)
    p.set_defaults(func=cmd_grade)

    p = sub.add_parser("stats", help="statistics over an answer log CSV")
    p.add_argument("--log", required=True, help="answers.csv")
    p.add_argument("--course-points", help="points.csv (sessionId,points)")
    p.add_argument("--question", help="question type to compare course points for, e.g. Q2")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--exercises", required=True, help="directory of exercise spec JSON files")
    p.add_argument("--static-dir", help="directory of built frontend assets to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (st.StatsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(1) from exc


if __name__ == "__main__":
    main()
