"""``azc`` command line: run, trace, matrix, test.

Exit status: 0 on success, 1 on a runtime error, 2 on a static error
(including unreadable input files).
"""

from __future__ import annotations

import argparse
import difflib
import sys
from pathlib import Path
from typing import List, Optional

from azc import diagnostics
from azc.driver import RunReport, run_source
from azc.evaluator import render_value
from azc.matrix import compute_matrix, render_matrix


def _read(path: str) -> Optional[str]:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        print(diagnostics.render(diagnostics.io_error(f"cannot read {path}: {err}")), file=sys.stderr)
        return None


def _diagnostic(report: RunReport) -> Optional[diagnostics.Diagnostic]:
    err = report.static_error or report.runtime_error
    return diagnostics.from_exception(err) if err is not None else None


def run_stdout(report: RunReport, dump_context: bool = False) -> str:
    """What ``azc run`` writes to standard output for ``report``."""
    lines: List[str] = list(report.output)
    if report.outcome is not None:
        lines.append(f"result = {render_value(report.outcome.result, report.outcome.context)}")
    if dump_context and report.evaluator is not None:
        lines.append(report.evaluator.ctx.dump())
    return "".join(line + "\n" for line in lines)


def _print_diagnostic(report: RunReport, fmt: str) -> None:
    d = _diagnostic(report)
    if d is None:
        return
    text = diagnostics.render_record(d) if fmt == "record" else diagnostics.render(d, report.source)
    print(text, file=sys.stderr)


def cmd_run(args) -> int:
    source = _read(args.file)
    if source is None:
        return 2
    report = run_source(source, strict_rules=args.strict_rules, trace=False)
    sys.stdout.write(run_stdout(report, args.dump_context))
    _print_diagnostic(report, args.diagnostics_format)
    return report.exit_code


def cmd_trace(args) -> int:
    source = _read(args.file)
    if source is None:
        return 2
    report = run_source(source, strict_rules=args.strict_rules, trace=True)
    if report.evaluator is not None and report.evaluator.trace is not None:
        for event in report.evaluator.trace:
            sys.stdout.write(event.to_json() + "\n")
    _print_diagnostic(report, args.diagnostics_format)
    return report.exit_code


def cmd_matrix(args) -> int:
    sys.stdout.write(render_matrix(compute_matrix()))
    return 0


def corpus_actual(source: str) -> str:
    """Observed output of one corpus program, as compared to its .expected."""
    report = run_source(source, trace=False)
    text = run_stdout(report)
    d = _diagnostic(report)
    if d is not None:
        text += f"error[{d.code}]\n"
    return text


def cmd_test(args) -> int:
    root = Path(args.dir)
    if not root.is_dir():
        print(diagnostics.render(diagnostics.io_error(f"not a directory: {root}")), file=sys.stderr)
        return 2
    programs = sorted(root.glob("*.azc"))
    if not programs:
        print(f"warning: no tests found in {root}")
        print("0 passed, 0 failed")
        return 0
    failed = 0
    for program in programs:
        expected_path = program.with_suffix(".expected")
        actual = corpus_actual(program.read_text(encoding="utf-8"))
        expected = expected_path.read_text(encoding="utf-8") if expected_path.exists() else None
        if actual == expected:
            print(f"PASS {program.name}")
            continue
        failed += 1
        print(f"FAIL {program.name}")
        if expected is None:
            print(f"  missing {expected_path.name}")
            continue
        diff = difflib.unified_diff(
            expected.splitlines(keepends=True),
            actual.splitlines(keepends=True),
            fromfile=expected_path.name,
            tofile="actual",
        )
        sys.stdout.writelines("  " + line if line.endswith("\n") else "  " + line + "\n" for line in diff)
    print(f"{len(programs) - failed} passed, {failed} failed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="azc", description="Assignment-calculus interpreter")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, handler, help_text in (
        ("run", cmd_run, "evaluate a program and print its result"),
        ("trace", cmd_trace, "print the rule applications as JSON lines"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file")
        p.add_argument("--strict-rules", action="store_true", help="no scope-exit release")
        p.add_argument(
            "--diagnostics-format", choices=("text", "record"), default="text", help="error output style"
        )
        if name == "run":
            p.add_argument("--dump-context", action="store_true", help="print the final tables")
        p.set_defaults(handler=handler)

    p = sub.add_parser("matrix", help="measure the reference-state transition matrix")
    p.set_defaults(handler=cmd_matrix)

    p = sub.add_parser("test", help="run a directory of .azc/.expected pairs")
    p.add_argument("dir")
    p.set_defaults(handler=cmd_test)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
