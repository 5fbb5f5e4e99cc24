from azc import diagnostics
from azc.diagnostics import ALL_CODES, RUNTIME_CODES, STATIC_CODES, Severity
from azc.driver import run_source
from azc.errors import ErrorKind, EvalError, StaticError
from azc.syntax.ast import SourceSpan


def diagnostic_for(source):
    report = run_source(source)
    err = report.static_error or report.runtime_error
    assert err is not None
    return diagnostics.from_exception(err)


def test_every_runtime_kind_has_a_code():
    assert set(RUNTIME_CODES) == set(ErrorKind)
    assert len(set(RUNTIME_CODES.values())) == len(RUNTIME_CODES)


def test_every_static_error_class_has_a_code():
    def subclasses(cls):
        for sub in cls.__subclasses__():
            yield sub
            yield from subclasses(sub)

    assert {cls.code for cls in subclasses(StaticError)} <= STATIC_CODES
    assert STATIC_CODES.isdisjoint(RUNTIME_CODES.values())


def test_every_kind_renders():
    span = SourceSpan(0, 1, 1, 1)
    for kind in ErrorKind:
        d = diagnostics.from_runtime(EvalError(kind, span, "x"))
        assert d.code in ALL_CODES and d.message


def test_immutable_mutation_message():
    d = diagnostic_for("let a: @cst Int { a <- 42; a := 10 }")
    assert d.code == "E-IMMUTABLE-MUTATION"
    assert d.severity is Severity.RUNTIME
    assert d.message == "`a` is not mutating"


def test_state_in_not_unique_message():
    d = diagnostic_for("let a: @mut Int { let b: @mut Int { let c: Int { a := 1; c &- a; b <- a } } }")
    assert d.code == "E-NOT-UNIQUE"
    assert d.state == "shared"
    assert "(state: shared)" in d.message


def test_text_rendering_points_at_source():
    source = "let a: @cst Int {\n  a <- 42\n  a := 10\n}"
    d = diagnostic_for(source)
    text = diagnostics.render(d, source)
    lines = text.split("\n")
    assert lines[0] == "runtime error: `a` is not mutating"
    assert lines[1] == " --> 3:3 [E-IMMUTABLE-MUTATION]"
    assert lines[3] == "3 |   a := 10"
    assert lines[4].index("^") == lines[3].index("a :=")


def test_record_rendering():
    d = diagnostic_for("let a: @cst Int { a <- 42; a := 10 }")
    assert diagnostics.render_record(d) == "code=E-IMMUTABLE-MUTATION severity=runtime line=1 column=28 state=unique"


def test_static_diagnostics():
    assert diagnostic_for("b ? 1").code == "E-LEX"
    assert diagnostic_for("let a Int { a }").code == "E-PARSE"
    d = diagnostic_for("x")
    assert d.code == "E-UNKNOWN-VARIABLE" and d.severity is Severity.STATIC
    assert diagnostic_for("let f: fun(x: Int) -> Int { f() }").code == "E-MISSING-ARGUMENT"


def test_io_error():
    d = diagnostics.io_error("cannot read nothing.azc")
    assert d.code == "E-IO" and "nothing.azc" in diagnostics.render(d)
