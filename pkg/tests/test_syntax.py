import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from azc.errors import DuplicateArgumentName, DuplicateParameter, ParseError, ShadowingDeclaration
from azc.syntax import LexError, Tok, format_term, parse_source, tokenize
from azc.syntax.ast import (
    Arg,
    AssignField,
    AssignOp,
    AssignVar,
    Atom,
    AtomicType,
    Call,
    FieldAccess,
    FunctionType,
    If,
    Lambda,
    Let,
    New,
    Probe,
    ProbeKind,
    Qualifier,
    Return,
    Seq,
    SourceSpan,
    StructType,
    Var,
)

OWN_MUT = frozenset({Qualifier.OWN, Qualifier.MUT})
OWN_CST = frozenset({Qualifier.OWN, Qualifier.CST})


def kinds(source):
    return [t.kind for t in tokenize(source) if t.kind is not Tok.EOF]


def test_tokenize_copy():
    toks = [t for t in tokenize("a := 10") if t.kind is not Tok.EOF]
    assert [t.kind for t in toks] == [Tok.IDENT, Tok.OP_COPY, Tok.INT]
    assert toks[0].value == "a" and toks[2].value == 10


def test_tokenize_alias():
    assert kinds("c &- a") == [Tok.IDENT, Tok.OP_ALIAS, Tok.IDENT]


def test_tokenize_move_and_qualifiers():
    assert kinds("let a: @cst @own Int") == [Tok.LET, Tok.IDENT, Tok.COLON, Tok.QUAL, Tok.QUAL, Tok.IDENT]
    assert kinds("b <- 20") == [Tok.IDENT, Tok.OP_MOVE, Tok.INT]


def test_lex_error_column():
    with pytest.raises(LexError) as info:
        tokenize("b ? 20")
    assert info.value.span.column == 3


def test_unknown_qualifier():
    with pytest.raises(LexError):
        tokenize("@foo Int")


def test_spans_are_positions():
    toks = tokenize("a\n  := 1")
    op = next(t for t in toks if t.kind is Tok.OP_COPY)
    assert (op.span.line, op.span.column, op.span.start_offset, op.span.end_offset) == (2, 3, 4, 6)


def test_span_invariants():
    with pytest.raises(ValueError):
        SourceSpan(3, 2, 1, 1)
    with pytest.raises(ValueError):
        SourceSpan(0, 0, 0, 1)


def test_parse_let():
    term = parse_source("let a: @mut Int { a := 10 }")
    assert term == Let("a", AtomicType(OWN_MUT, "Int"), AssignVar("a", AssignOp.COPY, Atom(10)))


def test_application_left_associative():
    term = parse_source("f(x <- 1)(y <- 2)")
    inner = Call(Var("f"), (Arg("x", AssignOp.MOVE, Atom(1)),))
    assert term == Call(inner, (Arg("y", AssignOp.MOVE, Atom(2)),))


def test_sequence_right_associative():
    term = parse_source("1; 2; 3")
    assert term == Seq(Atom(1), Seq(Atom(2), Atom(3)))


def test_newline_is_sequence():
    assert parse_source("1\n2\n3") == parse_source("1; 2; 3")


def test_default_qualifiers():
    term = parse_source("let a: Int { a }")
    assert term.type == AtomicType(OWN_CST, "Int")


def test_infix_sugar():
    term = parse_source("1 + 2 * 3")
    mul = Call(Var("Int.*"), (Arg("lhs", AssignOp.COPY, Atom(2)), Arg("rhs", AssignOp.COPY, Atom(3))))
    assert term == Call(Var("Int.+"), (Arg("lhs", AssignOp.COPY, Atom(1)), Arg("rhs", AssignOp.COPY, mul)))


def test_negative_literal_and_bools():
    assert parse_source("-4") == Atom(-4)
    assert parse_source("true") == Atom(True)
    assert Atom(True) != Atom(1)


def test_record_type_and_fields():
    term = parse_source("let r: @mut {x: @mut Int} { r.x := 1 }")
    assert isinstance(term.type, StructType)
    assert term.body == AssignField(Var("r"), "x", AssignOp.COPY, Atom(1))


def test_duplicate_parameter():
    with pytest.raises(DuplicateParameter):
        parse_source("fun(x: @own Int, x: @own Int) -> Int { return := x }")


def test_duplicate_argument():
    with pytest.raises(DuplicateArgumentName):
        parse_source("f(x := 1, x := 2)")


def test_shadowing_rejected():
    with pytest.raises(ShadowingDeclaration):
        parse_source("let a: Int { let a: Int { a } }")


def test_shadowing_parameter_rejected():
    with pytest.raises(ShadowingDeclaration):
        parse_source("fun(x: Int) -> Int { let x: Int { x } }")


def test_sibling_declarations_allowed():
    parse_source("let a: Int { a }; let a: Int { a }")


def test_predeclared_names_cannot_be_redeclared():
    with pytest.raises(ShadowingDeclaration):
        parse_source("let a: Int { a }", predeclared=("a",))


def test_parse_error_has_expected_set():
    with pytest.raises(ParseError) as info:
        parse_source("let a Int { a }")
    assert info.value.expected


def test_invalid_assignment_target():
    with pytest.raises(ParseError):
        parse_source("1 := 2")


def test_format_examples():
    assert format_term(Atom(42)) == "42"
    assert format_term(Seq(Var("a"), Seq(Var("b"), Var("c")))) == "a\nb\nc"
    let = Let("x", AtomicType(OWN_CST, "Int"), Var("x"))
    assert format_term(let) == "let x: @cst Int {\n  x\n}"


def test_format_left_nested_sequence_keeps_parens():
    term = Seq(Seq(Var("a"), Var("b")), Var("c"))
    assert parse_source(format_term(term)) == term


# ---------------------------------------------------------------------------
# Round trip over generated terms

QUALS = st.sampled_from(
    [OWN_CST, OWN_MUT, frozenset({Qualifier.BRW, Qualifier.CST}), frozenset({Qualifier.BRW, Qualifier.MUT})]
)
VARS = st.sampled_from(["a", "b", "f", "g"])
FIELDS = st.sampled_from(["x", "y", "z"])
OPS = st.sampled_from(list(AssignOp))


def types(depth=0):
    atomic = st.builds(AtomicType, QUALS, st.sampled_from(["Int", "Bool"]))
    if depth >= 2:
        return atomic

    @st.composite
    def compound(draw):
        names = draw(st.lists(FIELDS, unique=True, max_size=3))
        members = tuple((n, draw(types(depth + 1))) for n in names)
        if draw(st.booleans()):
            return StructType(draw(QUALS), members)
        return FunctionType(draw(QUALS), members, draw(types(depth + 1)))

    return st.one_of(atomic, compound())


@st.composite
def terms(draw, depth=0):
    leaves = [
        st.builds(Atom, st.integers(-50, 50)),
        st.builds(Atom, st.booleans()),
        st.builds(Var, VARS),
    ]
    if depth >= 4:
        return draw(st.one_of(leaves))
    sub = terms(depth + 1)
    choice = draw(st.integers(0, 14))
    if choice <= 2:
        return draw(st.one_of(leaves))
    if choice == 3:
        return FieldAccess(draw(sub), draw(FIELDS))
    if choice == 4:
        names = draw(st.lists(FIELDS, unique=True, max_size=2))
        return New(StructType(draw(QUALS), tuple((n, draw(types(1))) for n in names)))
    if choice == 5:
        return Let(f"v{depth}", draw(types()), draw(sub))
    if choice == 6:
        params = draw(st.lists(st.sampled_from(["p", "q"]), unique=True, max_size=2))
        ty = FunctionType(draw(QUALS), tuple((p, draw(types(1))) for p in params), draw(types(1)))
        return Lambda(ty, tuple(params), draw(sub))
    if choice == 7:
        return AssignVar(draw(VARS), draw(OPS), draw(sub))
    if choice == 8:
        target = draw(st.one_of(st.builds(Var, VARS), st.builds(FieldAccess, st.builds(Var, VARS), FIELDS)))
        return AssignField(target, draw(FIELDS), draw(OPS), draw(sub))
    if choice == 9:
        names = draw(st.lists(st.sampled_from(["x", "y", "lhs"]), unique=True, max_size=3))
        callee = draw(st.one_of(st.builds(Var, VARS), sub))
        return Call(callee, tuple(Arg(n, draw(OPS), draw(sub)) for n in names))
    if choice == 10:
        name = draw(st.sampled_from(["Int.+", "Int.-", "Int.*", "Int.==", "Int.>"]))
        return Call(Var(name), (Arg("lhs", AssignOp.COPY, draw(sub)), Arg("rhs", AssignOp.COPY, draw(sub))))
    if choice == 11:
        return Call(Var("Bool.not"), (Arg("operand", AssignOp.COPY, draw(sub)),))
    if choice == 12:
        return Return(draw(OPS), draw(sub))
    if choice == 13:
        return If(draw(sub), draw(sub), draw(sub))
    if draw(st.booleans()):
        return Probe(draw(st.sampled_from(list(ProbeKind))), draw(sub))
    return Seq(draw(sub), draw(sub))


@settings(max_examples=1000, derandomize=True, deadline=None)
@given(terms())
def test_round_trip(term):
    text = format_term(term)
    parsed = parse_source(text)
    assert parsed == term
    assert format_term(parsed) == text


@settings(max_examples=1000, derandomize=True, deadline=None)
@given(*[terms(2).filter(lambda t: not isinstance(t, Seq))] * 3)
def test_sequence_associativity(t1, t2, t3):
    text = "; ".join(format_term(t) for t in (t1, t2, t3))
    assert parse_source(text) == Seq(t1, Seq(t2, t3))
