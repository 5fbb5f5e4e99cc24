import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from azc.cli import main

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_run_success(tmp_path, capsys):
    path = write(tmp_path, "ok.azc", "let a: @mut Int { a := 2 + 3; print(a); a }")
    assert main(["run", path]) == 0
    assert capsys.readouterr().out == "print(a) = 5\nresult = 5\n"


def test_run_runtime_error(tmp_path, capsys):
    path = write(tmp_path, "bad.azc", "let a: @cst Int { a <- 42; a := 10 }")
    assert main(["run", path]) == 1
    err = capsys.readouterr().err
    assert "[E-IMMUTABLE-MUTATION]" in err and "`a` is not mutating" in err


def test_run_static_error(tmp_path, capsys):
    path = write(tmp_path, "bad.azc", "nowhere")
    assert main(["run", path]) == 2
    assert "[E-UNKNOWN-VARIABLE]" in capsys.readouterr().err


def test_missing_file(capsys):
    assert main(["run", "/nonexistent/x.azc"]) == 2
    assert "E-IO" in capsys.readouterr().err


def test_record_format(tmp_path, capsys):
    path = write(tmp_path, "bad.azc", "let a: @cst Int { a <- 42; a := 10 }")
    assert main(["run", path, "--diagnostics-format", "record"]) == 1
    assert capsys.readouterr().err.strip() == (
        "code=E-IMMUTABLE-MUTATION severity=runtime line=1 column=28 state=unique"
    )


def test_dump_context(tmp_path, capsys):
    path = write(tmp_path, "ok.azc", "let a: @mut Int { a := 1; a }")
    assert main(["run", path, "--dump-context"]) == 0
    out = capsys.readouterr().out
    for section in ("nu:", "rho:", "mu:", "kappa:"):
        assert section in out


def test_strict_rules_flag(capsys):
    assert main(["run", str(CORPUS / "scope_release.azc"), "--strict-rules"]) == 0
    strict = capsys.readouterr().out
    assert main(["run", str(CORPUS / "scope_release.azc")]) == 0
    assert capsys.readouterr().out != strict


def test_trace_lines_are_json(tmp_path, capsys):
    path = write(tmp_path, "ok.azc", "let a: @mut Int { a := 1 }")
    assert main(["trace", path]) == 0
    lines = capsys.readouterr().out.splitlines()
    events = [json.loads(line) for line in lines]
    assert [e["step"] for e in events] == list(range(1, len(events) + 1))
    assert list(events[0]) == ["step", "rule", "depth", "line", "column", "start", "end", "detail"]
    assert events[-1]["rule"] == "E-Let" and events[-1]["depth"] == 0


def test_trace_of_failing_program(tmp_path, capsys):
    path = write(tmp_path, "bad.azc", "let a: @cst Int { a <- 42; a := 10 }")
    assert main(["trace", path]) == 1
    out = capsys.readouterr()
    assert out.out and "E-IMMUTABLE-MUTATION" in out.err


def test_matrix(capsys):
    assert main(["matrix"]) == 0
    assert capsys.readouterr().out == (ROOT / "docs" / "transition_matrix.txt").read_text(encoding="utf-8")


def test_corpus_passes(capsys):
    assert main(["test", str(CORPUS)]) == 0
    out = capsys.readouterr().out
    assert "0 failed" in out and "FAIL" not in out


def test_corrupted_expectation_shows_diff(tmp_path, capsys):
    shutil.copy(CORPUS / "factorial.azc", tmp_path)
    (tmp_path / "factorial.expected").write_text("result = 121\n", encoding="utf-8")
    assert main(["test", str(tmp_path)]) == 1
    out = capsys.readouterr().out
    assert "FAIL factorial.azc" in out
    assert "-result = 121" in out and "+result = 120" in out
    assert "0 passed, 1 failed" in out


def test_missing_expectation(tmp_path, capsys):
    shutil.copy(CORPUS / "factorial.azc", tmp_path)
    assert main(["test", str(tmp_path)]) == 1
    assert "missing factorial.expected" in capsys.readouterr().out


def test_empty_corpus_warns(tmp_path, capsys):
    assert main(["test", str(tmp_path)]) == 0
    assert "warning: no tests found" in capsys.readouterr().out


def test_test_requires_directory(capsys):
    assert main(["test", "/nonexistent"]) == 2


def test_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 2


def test_console_script_entry_point():
    done = subprocess.run(
        [sys.executable, "-m", "azc.cli", "run", str(CORPUS / "factorial.azc")],
        capture_output=True, text=True, check=False,
    )
    assert done.returncode == 0 and done.stdout.strip().endswith("result = 120")
