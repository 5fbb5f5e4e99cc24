"""Source-to-result pipeline: tokenize, parse, type, check calls, evaluate.

A :class:`Session` keeps one evaluator alive so that several fragments can
run against the same context, with names declared up front visible to all of
them.  The property tests and the call/inline comparison use that.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from azc.errors import EvalError, StaticError
from azc.evaluator import EvalOutcome, Evaluator
from azc.syntax import LexError, parse_source, parse_type_source
from azc.syntax.ast import Term, TypeExpr
from azc.typesys import TypeEnv, build_type_env, check_arity_and_names, check_type


def check_source(source: str, predeclared: Optional[Dict[str, TypeExpr]] = None) -> Tuple[Term, TypeEnv]:
    """Every static check; raises LexError or a StaticError subclass."""
    predeclared = dict(predeclared or {})
    term = parse_source(source, tuple(predeclared))
    env = build_type_env(term, predeclared)
    problems = check_arity_and_names(term, env)
    if problems:
        raise problems[0]
    return term, env


class Session:
    def __init__(self, *, strict_rules: bool = False, trace: bool = True):
        self.evaluator = Evaluator(strict_rules=strict_rules, trace=trace)
        self.declared: Dict[str, TypeExpr] = {}

    @property
    def context(self):
        return self.evaluator.ctx

    def declare(self, name: str, ty: Union[str, TypeExpr]):
        if isinstance(ty, str):
            ty = parse_type_source(ty)
        check_type(ty)
        self.declared[name] = ty
        return self.evaluator.declare(name, ty)

    def ref(self, name: str):
        return self.context.vars[self.evaluator.frame.names[name]]

    def execute(self, source: str) -> EvalOutcome:
        term, env = check_source(source, self.declared)
        return self.evaluator.run(term, env)


@dataclass
class RunReport:
    """What one program run produced.  Exactly one of the three ends holds:
    ``outcome`` (success), ``static_error`` or ``runtime_error``."""

    source: str
    outcome: Optional[EvalOutcome] = None
    static_error: Optional[Exception] = None
    runtime_error: Optional[EvalError] = None
    output: List[str] = field(default_factory=list)
    evaluator: Optional[Evaluator] = None

    @property
    def exit_code(self) -> int:
        if self.static_error is not None:
            return 2
        if self.runtime_error is not None:
            return 1
        return 0


def run_source(source: str, *, strict_rules: bool = False, trace: bool = True) -> RunReport:
    report = RunReport(source)
    try:
        term, env = check_source(source)
    except (LexError, StaticError) as err:
        report.static_error = err
        return report
    evaluator = Evaluator(env, strict_rules=strict_rules, trace=trace)
    report.evaluator = evaluator
    try:
        report.outcome = evaluator.run(term)
    except EvalError as err:
        report.runtime_error = err
    report.output = list(evaluator.output)
    return report
