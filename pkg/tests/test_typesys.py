import pytest

from azc import errors
from azc.driver import check_source
from azc.syntax import parse_source, parse_type_source
from azc.syntax.ast import AssignVar, Atom, AtomicType, Call, Qualifier, RecType, Var, walk
from azc.typesys import (
    CapabilitySet,
    build_type_env,
    check_arity_and_names,
    equivalent,
    initial_capabilities,
    resolve,
    unroll,
    well_formed,
)

B, O, C, M = Qualifier.BRW, Qualifier.OWN, Qualifier.CST, Qualifier.MUT


def test_well_formed():
    assert well_formed({O, M})
    assert not well_formed({O, B, C})
    assert not well_formed(set())
    assert not well_formed({O})


def test_initial_capabilities():
    assert initial_capabilities(parse_type_source("@mut Int")) == CapabilitySet(has_ro=True, has_rw=True)
    assert initial_capabilities(parse_type_source("@cst Int")) == CapabilitySet(has_ro=True)
    assert initial_capabilities(parse_type_source("@own @cst {x: @mut Int}")) == CapabilitySet(has_ro=True)


def test_capability_rendering():
    assert str(CapabilitySet(True, True, frozenset({3}))) == "{ro, rw, b[r3]}"
    assert str(CapabilitySet()) == "{}"


def test_env_variable_occurrences_share_declared_type():
    term = parse_source("let a: @cst Int { a <- 42; a }")
    env = build_type_env(term)
    declared = term.type
    occurrences = [n for n in walk(term) if isinstance(n, (Var, AssignVar))]
    assert occurrences and all(env[n] == declared for n in occurrences)


def test_atom_default_type():
    term = parse_source("42")
    env = build_type_env(term)
    assert env[term] == AtomicType(frozenset({O, M}), "Int")


def test_call_has_codomain_type():
    term = parse_source("let f: fun(x: Int) -> @own Int { f(x := 1) }")
    env = build_type_env(term)
    call = next(n for n in walk(term) if isinstance(n, Call))
    assert env[call] == parse_type_source("@own Int")


def test_env_is_deterministic():
    source = "let r: @mut {x: @mut Int} { r <- new {x: @mut Int}; r.x := 1 }"
    term = parse_source(source)
    first = [build_type_env(term).get(n) for n in walk(term)]
    second = [build_type_env(term).get(n) for n in walk(term)]
    assert first == second


@pytest.mark.parametrize(
    "source, error",
    [
        ("x", errors.UnknownVariable),
        ("let r: {x: Int} { r.y }", errors.UnknownField),
        ("let a: Int { a() }", errors.NotAFunctionType),
        ("let a: @cst @mut Int { a }", errors.MalformedQualifiers),
        ("let a: Float { a }", errors.UnknownType),
        ("new Int", errors.NotAStructType),
        ("let a: Int { fun() -> Int { return := a } }", errors.CapturedVariable),
    ],
)
def test_static_errors(source, error):
    with pytest.raises(error):
        build_type_env(parse_source(source))


def test_nested_qualifiers_checked():
    with pytest.raises(errors.MalformedQualifiers):
        build_type_env(parse_source("let r: {x: @brw @own Int} { r }"))


def test_arity_all_named():
    term = parse_source("let f: fun(x: Int, y: Int) -> Int { f(y := 1, x := 2) }")
    assert check_arity_and_names(term, build_type_env(term)) == []


def test_arity_missing():
    term = parse_source("let f: fun(x: Int, y: Int) -> Int { f(x := 1) }")
    problems = check_arity_and_names(term, build_type_env(term))
    assert [type(p) for p in problems] == [errors.MissingArgument]


def test_arity_unknown_name():
    term = parse_source("let f: fun(x: Int) -> Int { f(x := 1, z := 2) }")
    problems = check_arity_and_names(term, build_type_env(term))
    assert [type(p) for p in problems] == [errors.UnknownParameterName]


def test_prelude_sugar_typechecks():
    _, env = check_source("1 + 2 > 2")
    assert env is not None


def test_recursive_type_unrolls():
    ty = parse_type_source("rec F . fun(self: F, n: Int) -> @mut Int")
    assert isinstance(ty, RecType)
    once = unroll(ty)
    assert equivalent(once.dom["self"], ty)
    assert equivalent(resolve(once.dom["self"]), once)


def test_equivalence_respects_qualifiers():
    assert not equivalent(parse_type_source("@mut Int"), parse_type_source("@cst Int"))
    assert equivalent(parse_type_source("{x: Int}"), parse_type_source("@own @cst {x: @cst Int}"))


def test_literal_in_env_is_mutating():
    term = parse_source("true")
    assert isinstance(term, Atom)
    assert Qualifier.MUT in build_type_env(term)[term].quals
