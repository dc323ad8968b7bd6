"""Command-line interface for the deterministic pipeline.

Exit codes: 0 success, 1 diagnostics/violations/mismatches, 2 I/O or
unreadable input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .diagnostics import SyntaxDiagnosticError
from .ecore import EcoreParseError, emit_ecore, parse_ecore
from .evaluation import compare, format_report, report_to_dict
from .gateway import FixtureMissError, TransportError
from .model import InvalidMetamodelError, Metamodel
from .pipeline import run_scenario
from .puml import PumlSyntaxError, emit_puml, parse_puml

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_IO = 2


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_output(text: str, out_path: str | None) -> None:
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text, encoding="utf-8")


def _print_warnings(warnings) -> None:
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)


def _parse_model_file(path: str, strict: bool = False) -> Metamodel:
    text = _read(path)
    if path.endswith(".puml") or "@startuml" in text:
        result = parse_puml(text, strict=strict, source=path)
    else:
        result = parse_ecore(text, strict=strict)
    _print_warnings(result.warning_messages())
    return result.metamodel


def cmd_puml2ecore(args) -> int:
    try:
        text = _read(args.input)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        result = parse_puml(text, strict=args.strict, source=args.input)
    except (PumlSyntaxError, InvalidMetamodelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    _print_warnings(result.warning_messages())
    try:
        _write_output(emit_ecore(result.metamodel), args.output)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_ecore2puml(args) -> int:
    try:
        text = _read(args.input)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        result = parse_ecore(text, strict=args.strict)
    except EcoreParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvalidMetamodelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    _print_warnings(result.warning_messages())
    try:
        _write_output(emit_puml(result.metamodel), args.output)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        text = _read(args.input)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if args.input.endswith(".puml") or "@startuml" in text:
            result = parse_puml(text, source=args.input)
        else:
            result = parse_ecore(text)
    except (PumlSyntaxError, EcoreParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvalidMetamodelError as exc:
        for violation in exc.violations:
            print(violation)
        return EXIT_DIAGNOSTICS
    _print_warnings(result.warning_messages())
    print("valid")
    return EXIT_OK


def cmd_score(args) -> int:
    try:
        candidate = _parse_model_file(args.candidate)
        reference = _parse_model_file(args.reference)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SyntaxDiagnosticError, InvalidMetamodelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    report = compare(candidate, reference)
    if args.json:
        print(json.dumps(report_to_dict(report), indent=2))
    else:
        sys.stdout.write(format_report(report))
    if args.report_dir:
        from .report import write_report_outputs

        csv_path, fig_path = write_report_outputs(report, args.report_dir)
        print(f"wrote {csv_path} and {fig_path}", file=sys.stderr)
    return EXIT_OK


def cmd_run_scenario(args) -> int:
    backend = None
    if args.live:
        from .gateway import MODE_LIVE, BackendConfig

        backend = BackendConfig.from_env(mode=MODE_LIVE)
    try:
        result = run_scenario(args.scenario_dir, args.fixtures, backend=backend,
                              out_path=args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (FixtureMissError, TransportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS

    for i, record in enumerate(result.records):
        print(f"[{i}] {record.step}: requirements={record.requirement_count} "
              f"tokens={record.tokens} wall={record.wall_seconds:.2f}s")
        for warning in record.warnings:
            print(f"    warning: {warning}", file=sys.stderr)
    if args.report_dir:
        from .report import write_history_outputs

        csv_path, fig_path = write_history_outputs(result.records, args.report_dir)
        print(f"wrote {csv_path} and {fig_path}", file=sys.stderr)
    if not result.matches_expected:
        print(f"final document differs from {result.expected_path}: {result.diff_summary}",
              file=sys.stderr)
        return EXIT_DIAGNOSTICS
    print("final document matches expected output")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metaforge",
        description="PlantUML/Ecore metamodel tooling: convert, validate, score, replay, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("puml2ecore", help="transform a PlantUML class diagram to .ecore")
    p.add_argument("input")
    p.add_argument("output", nargs="?", default=None, help="output path (default: stdout)")
    p.add_argument("--strict", action="store_true", help="treat unsupported constructs as errors")
    p.set_defaults(func=cmd_puml2ecore)

    p = sub.add_parser("ecore2puml", help="transform an .ecore document to PlantUML")
    p.add_argument("input")
    p.add_argument("output", nargs="?", default=None)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_ecore2puml)

    p = sub.add_parser("validate", help="validate a .puml or .ecore file")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("score", help="compare a candidate metamodel against a reference")
    p.add_argument("candidate")
    p.add_argument("reference")
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.add_argument("--report-dir", default=None, help="also write report.csv and report.png here")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("run-scenario", help="replay a recorded scenario offline")
    p.add_argument("scenario_dir")
    p.add_argument("--fixtures", required=True, help="directory of canned LLM responses")
    p.add_argument("--out", default=None, help="write the final .ecore here")
    p.add_argument("--report-dir", default=None, help="also write history.csv and history.png here")
    p.add_argument("--live", action="store_true",
                   help="call the configured live backend instead of the fixture directory")
    p.set_defaults(func=cmd_run_scenario)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
