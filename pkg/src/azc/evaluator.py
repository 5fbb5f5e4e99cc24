"""Big-step evaluator: one rule application per term, threading one context.

Each rule application appends a :class:`TraceEvent` when it completes, so the
trace is a post-order listing of the derivation tree; ``depth`` gives the
nesting.  Assignments evaluate their right operand before their left one.

Default mode releases a declaration's reference when its scope ends (and
parameters once the call body is done), which hands borrowed fragments back
to their owners.  ``strict_rules`` turns that off and also drops the extra
owning-reference premise on moves, leaving only the rule premises.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from azc.context import (
    NULL,
    AtomValue,
    EvalContext,
    Function,
    Record,
    RefId,
    borrowers,
    classify_state,
    copy_value,
    readable,
    release_binding,
    shared,
    unique,
    writeable,
)
from azc.errors import ErrorKind, EvalError
from azc.syntax import operators
from azc.syntax.ast import (
    NO_SPAN,
    AssignField,
    AssignOp,
    AssignVar,
    Atom,
    Call,
    FieldAccess,
    FunctionType,
    If,
    Lambda,
    Let,
    Native,
    New,
    Probe,
    ProbeKind,
    Return,
    Seq,
    SourceSpan,
    Term,
    TypeExpr,
    Var,
)
from azc.syntax.printer import format_term
from azc.typesys import (
    PRELUDE_TYPES,
    CapabilitySet,
    TypeEnv,
    initial_capabilities,
    literal_type,
    resolve,
    struct_type,
)

# The return identifier.  ``return`` is a keyword, so no declaration can use it.
RETURN = "return"

RECURSION_LIMIT = 100_000


@dataclass(frozen=True)
class TraceEvent:
    step: int
    rule: str
    depth: int
    span: SourceSpan
    detail: Tuple[Tuple[str, object], ...] = ()

    def to_json(self) -> str:
        record = {
            "step": self.step,
            "rule": self.rule,
            "depth": self.depth,
            "line": self.span.line,
            "column": self.span.column,
            "start": self.span.start_offset,
            "end": self.span.end_offset,
            "detail": dict(self.detail),
        }
        return json.dumps(record, ensure_ascii=False)


@dataclass
class EvalOutcome:
    result: RefId
    context: EvalContext
    trace: List[TraceEvent]
    output: List[str]


@dataclass
class Frame:
    """Names visible in one function body.

    ``names`` maps source identifiers to their key in the variable table
    (they differ after renaming); ``types`` maps source identifiers to their
    declared type.
    """

    names: Dict[str, str] = field(default_factory=dict)
    types: Dict[str, TypeExpr] = field(default_factory=dict)


def _native_int(op: Callable[[int, int], object]):
    def run(values):
        return op(values["lhs"], values["rhs"])

    return run


NATIVE_OPS = {
    "Int.+": _native_int(lambda a, b: a + b),
    "Int.-": _native_int(lambda a, b: a - b),
    "Int.*": _native_int(lambda a, b: a * b),
    "Int.==": _native_int(lambda a, b: a == b),
    "Int.>": _native_int(lambda a, b: a > b),
    operators.NOT: lambda values: not values["operand"],
}


def install_prelude(ctx: EvalContext, frame: Frame) -> None:
    """Bind the built-in atom operations as ordinary function values."""
    for name, ty in PRELUDE_TYPES.items():
        params = tuple(p for p, _ in ty.params)
        value = Function(ty, params, Native(name))
        ctx.vars[name] = ctx.allocate(value, initial_capabilities(ty))
        frame.names[name] = name
        frame.types[name] = ty


def _subject(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    text = format_term(term)
    return text if "\n" not in text and len(text) <= 40 else text.split("\n")[0] + " ..."


class Evaluator:
    def __init__(
        self,
        env: Optional[TypeEnv] = None,
        ctx: Optional[EvalContext] = None,
        *,
        strict_rules: bool = False,
        trace: bool = True,
        prelude: bool = True,
    ):
        self.env = env if env is not None else TypeEnv()
        self.ctx = ctx if ctx is not None else EvalContext()
        self.strict_rules = strict_rules
        self.trace: Optional[List[TraceEvent]] = [] if trace else None
        self.output: List[str] = []
        self.frames: List[Frame] = [Frame()]
        self.depth = 0
        self.step = 0
        if prelude:
            install_prelude(self.ctx, self.frames[0])

    # -- entry points --------------------------------------------------

    def declare(self, name: str, ty: TypeExpr) -> RefId:
        """Declare a top-level name that outlives individual runs."""
        return self._declare(name, ty)

    def run(self, term: Term, env: Optional[TypeEnv] = None) -> EvalOutcome:
        if env is not None:
            self.env = env
        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old_limit, RECURSION_LIMIT))
        try:
            result = self.eval(term)
        finally:
            sys.setrecursionlimit(old_limit)
        return EvalOutcome(result, self.ctx, self.trace if self.trace is not None else [], self.output)

    # -- plumbing ------------------------------------------------------

    @property
    def frame(self) -> Frame:
        return self.frames[-1]

    def emit(self, rule: str, span: SourceSpan, depth: int, **detail) -> None:
        if self.trace is None:
            return
        self.step += 1
        self.trace.append(TraceEvent(self.step, rule, depth, span, tuple(detail.items())))

    def fail(self, kind: ErrorKind, span: SourceSpan, subject: str, ref: Optional[RefId] = None, detail=""):
        state = classify_state(ref, self.ctx) if ref is not None else None
        return EvalError(kind, span, subject, ref=ref, state=state, detail=detail)

    def _declare(self, name: str, ty: TypeExpr) -> RefId:
        """E-Let's binding step: a fresh, unbound reference named ``name``.

        A name already present in the variable table (a caller's binding, or
        a leftover under the strict rules) is given a fresh key instead.
        """
        key = name if name not in self.ctx.vars else self.ctx.fresh_name(name)
        r = self.ctx.new_reference()
        self.ctx.vars[key] = r
        self.frame.names[name] = key
        self.frame.types[name] = ty
        return r

    def _lookup(self, name: str, span: SourceSpan, depth: Optional[int] = None) -> RefId:
        """E-Var, recorded at ``depth`` (the current depth by default)."""
        key = self.frame.names.get(name)
        if key is None or key not in self.ctx.vars:
            if name == RETURN:
                raise self.fail(ErrorKind.MISSING_RETURN, span, name)
            raise self.fail(ErrorKind.UNDEFINED_VARIABLE, span, name)
        r = self.ctx.vars[key]
        self.emit("E-Var", span, self.depth if depth is None else depth, name=name, ref=f"r{r}")
        return r

    # -- dispatcher ----------------------------------------------------

    def eval(self, term: Term) -> RefId:
        method = getattr(self, "eval_" + type(term).__name__, None)
        if method is None:
            raise TypeError(f"not a term: {term!r}")
        self.depth += 1
        try:
            r, rule, detail = method(term)
        finally:
            self.depth -= 1
        if rule is not None:
            self.emit(rule, term.span, self.depth, **detail)
        return r

    # Every eval_* method runs one level deeper than the event it produces and
    # returns (result reference, rule name, detail).

    def eval_Atom(self, term: Atom):
        ty = self.env.get(term) or literal_type(term.value)
        r = self.ctx.allocate(AtomValue(term.value), initial_capabilities(ty))
        return r, "E-Atom", {"ref": f"r{r}", "value": _literal(term.value)}

    def eval_Lambda(self, term: Lambda):
        value = Function(term.type, term.params, term.body)
        r = self.ctx.allocate(value, initial_capabilities(term.type))
        return r, "E-Fun", {"ref": f"r{r}"}

    def eval_New(self, term: New):
        struct = struct_type(term.type)
        fields = tuple((name, self.ctx.new_reference()) for name, _ in struct.fields)
        r = self.ctx.allocate(Record(fields, struct), initial_capabilities(term.type))
        return r, "E-New", {"ref": f"r{r}"}

    def eval_Var(self, term: Var):
        # _lookup emits the event itself (it is shared with assignment targets).
        return self._lookup(term.name, term.span, self.depth - 1), None, {}

    def eval_FieldAccess(self, term: FieldAccess):
        target = self.eval(term.target)
        return self._field(target, term.field, term.target, term.span), "E-Field", {"field": term.field}

    def _field(self, target: RefId, name: str, target_term: Term, span: SourceSpan) -> RefId:
        if not readable(target, self.ctx):
            raise self.fail(ErrorKind.NOT_READABLE, span, _subject(target_term), target)
        value = self.ctx.value_of(target)
        if not isinstance(value, Record) or name not in value.field_map:
            raise self.fail(ErrorKind.UNKNOWN_FIELD, span, name, target)
        return value.field_map[name]

    def eval_Let(self, term: Let):
        frame = self.frame
        saved = (frame.names.get(term.name), frame.types.get(term.name))
        r = self._declare(term.name, term.type)
        key = frame.names[term.name]
        try:
            result = self.eval(term.body)
        finally:
            if saved[0] is None:
                frame.names.pop(term.name, None)
                frame.types.pop(term.name, None)
            else:
                frame.names[term.name], frame.types[term.name] = saved
        if not self.strict_rules:
            release_binding(key, self.ctx, keep=result)
        return result, "E-Let", {"name": term.name, "ref": f"r{r}"}

    def eval_Seq(self, term: Seq):
        self.eval(term.first)
        return self.eval(term.second), "E-Seq", {}

    def eval_If(self, term: If):
        cond = self.eval(term.cond)
        if not readable(cond, self.ctx):
            raise self.fail(ErrorKind.NOT_READABLE, term.cond.span, _subject(term.cond), cond)
        value = self.ctx.value_of(cond)
        if not (isinstance(value, AtomValue) and isinstance(value.value, bool)):
            raise self.fail(ErrorKind.CONDITION_NOT_BOOLEAN, term.cond.span, _subject(term.cond), cond)
        if value.value:
            return self.eval(term.then), "E-Cond-True", {}
        return self.eval(term.else_), "E-Cond-False", {}

    def eval_Probe(self, term: Probe):
        r = self.eval(term.target)
        subject = format_term(term.target)
        if term.kind is ProbeKind.STATE:
            self.output.append(f"state({subject}) = {classify_state(r, self.ctx)}")
        else:
            if not readable(r, self.ctx):
                raise self.fail(ErrorKind.NOT_READABLE, term.target.span, _subject(term.target), r)
            self.output.append(f"print({subject}) = {render_value(r, self.ctx)}")
        return r, None, {}

    # -- assignments ---------------------------------------------------

    def eval_AssignVar(self, term: AssignVar):
        def left():
            return self._lookup(term.name, term.lhs_span), self.frame.types.get(term.name)

        return self._assign(term.op, lambda: self.eval(term.value), left, term.span, term.name, term.value)

    def eval_AssignField(self, term: AssignField):
        def left():
            self.depth += 1
            try:
                target = self.eval(term.target)
                r = self._field(target, term.field, term.target, term.lhs_span)
            finally:
                self.depth -= 1
            self.emit("E-Field", term.lhs_span, self.depth, field=term.field)
            ty = self.env.get(term)
            if ty is None:
                struct = struct_type(self.ctx.value_of(target).type)
                ty = struct.field_map[term.field]
            return r, ty

        subject = f"{format_term(term.target)}.{term.field}"
        return self._assign(term.op, lambda: self.eval(term.value), left, term.span, subject, term.value)

    def eval_Return(self, term: Return):
        def left():
            return self._lookup(RETURN, term.span), self.frame.types.get(RETURN)

        self.depth += 1
        try:
            r, rule, detail = self._assign(
                term.op, lambda: self.eval(term.value), left, term.span, RETURN, term.value
            )
        finally:
            self.depth -= 1
        self.emit(rule, term.span, self.depth, **detail)
        return r, "E-Ret", {}

    def _assign(
        self,
        op: AssignOp,
        rhs: Callable[[], RefId],
        lhs: Callable[[], Tuple[RefId, TypeExpr]],
        span: SourceSpan,
        lhs_subject: str,
        rhs_term: Optional[Term],
    ):
        """Shared body of the copy, move and alias rules.

        ``rhs`` and ``lhs`` evaluate the operands (right first); ``lhs``
        also yields the left operand's static type.
        """
        right = rhs()
        left, left_type = lhs()
        ctx = self.ctx
        rhs_subject = _subject(rhs_term) if rhs_term is not None else "<value>"
        rhs_span = rhs_term.span if rhs_term is not None else span
        detail = {"op": op.value, "left": f"r{left}", "right": f"r{right}"}

        if op is AssignOp.COPY:
            if not readable(right, ctx):
                raise self.fail(ErrorKind.NOT_READABLE, rhs_span, rhs_subject, right)
            try:
                if ctx.refs.get(left, NULL) == NULL:
                    loc = copy_value(ctx.refs[right], ctx)
                    ctx.bind(left, loc)
                    ctx.set_caps(left, initial_capabilities(left_type))
                    return left, "E-Copy-Unalloc", detail
                if not writeable(left, ctx):
                    raise self.fail(ErrorKind.IMMUTABLE_MUTATION, span, lhs_subject, left)
                copy_value(ctx.refs[right], ctx, dst=ctx.refs[left])
                return left, "E-Copy-Mutating", detail
            except EvalError as err:
                if err.kind is ErrorKind.COPY_OF_UNDEFINED and err.span is NO_SPAN:
                    raise self.fail(ErrorKind.COPY_OF_UNDEFINED, rhs_span, rhs_subject, right) from None
                raise

        if op is AssignOp.MOVE:
            if not readable(right, ctx):
                raise self.fail(ErrorKind.NOT_READABLE, rhs_span, rhs_subject, right)
            owning = self.strict_rules or not ctx.caps[right].borrows
            if not unique(right, ctx) or not owning:
                raise self.fail(ErrorKind.NOT_UNIQUE, rhs_span, rhs_subject, right)
            value = ctx.value_of(right)
            if ctx.refs.get(left, NULL) == NULL:
                loc = ctx.fresh_location()
                ctx.store(loc, value)
                ctx.bind(left, loc)
                ctx.set_caps(left, initial_capabilities(left_type))
                rule = "E-Move-Unalloc"
            else:
                if not writeable(left, ctx):
                    raise self.fail(ErrorKind.IMMUTABLE_MUTATION, span, lhs_subject, left)
                ctx.store(ctx.refs[left], value)
                rule = "E-Move-Mutating"
            ctx.bind(right, NULL)
            ctx.set_caps(right, CapabilitySet())
            return left, rule, detail

        # Alias: the rule is chosen by the left operand's mutability.
        if left_type is not None and left_type.is_mut:
            if not writeable(right, ctx):
                raise self.fail(ErrorKind.NOT_WRITEABLE, rhs_span, rhs_subject, right)
            if shared(left, ctx):
                raise self.fail(ErrorKind.ALIAS_TARGET_SHARED, span, lhs_subject, left)
            if not all(writeable(s, ctx) for s in borrowers(right, ctx)):
                raise self.fail(ErrorKind.ALIAS_MUTABILITY_MISMATCH, rhs_span, rhs_subject, right)
            caps = CapabilitySet(has_rw=True, borrows=frozenset({right}))
            rule = "E-Alias-Mut"
        else:
            if not readable(right, ctx):
                raise self.fail(ErrorKind.NOT_READABLE, rhs_span, rhs_subject, right)
            if shared(left, ctx):
                raise self.fail(ErrorKind.ALIAS_TARGET_SHARED, span, lhs_subject, left)
            if any(writeable(s, ctx) for s in borrowers(right, ctx)):
                raise self.fail(ErrorKind.ALIAS_MUTABILITY_MISMATCH, rhs_span, rhs_subject, right)
            caps = CapabilitySet(has_ro=True, borrows=frozenset({right}))
            rule = "E-Alias-Cst"
        ctx.bind(left, ctx.refs[right])
        ctx.set_caps(left, caps)
        return left, rule, detail

    # -- calls ---------------------------------------------------------

    def eval_Call(self, term: Call):
        ctx = self.ctx
        base = self.depth

        # E-Callee
        self.depth += 1
        try:
            callee = self.eval(term.callee)
        finally:
            self.depth -= 1
        if not readable(callee, ctx):
            raise self.fail(ErrorKind.NOT_READABLE, term.callee.span, _subject(term.callee), callee)
        fn = ctx.value_of(callee)
        if not isinstance(fn, Function):
            raise self.fail(ErrorKind.CALLEE_NOT_FUNCTION, term.callee.span, _subject(term.callee), callee)
        self.emit("E-Callee", term.callee.span, base, ref=f"r{callee}")
        fn_type: FunctionType = resolve(fn.type)
        dom = fn_type.dom

        # E-Args-N / E-Args-0: each argument is `let x: dom(x) { x <op> t }`,
        # with the right operand evaluated in the caller's scope.
        keys: Dict[str, str] = {}
        for arg in term.args:
            key = arg.name if arg.name not in ctx.vars else ctx.fresh_name(arg.name)
            param_ref = ctx.new_reference()
            ctx.vars[key] = param_ref
            keys[arg.name] = key

            def left(key=key, arg=arg):
                r = ctx.vars[key]
                self.emit("E-Var", arg.span, self.depth, name=key, ref=f"r{r}")
                return r, dom.get(arg.name)

            self.depth += 2
            try:
                r, rule, detail = self._assign(
                    arg.op, lambda arg=arg: self.eval(arg.value), left, arg.span, arg.name, arg.value
                )
            finally:
                self.depth -= 2
            self.emit(rule, arg.span, base + 1, **detail)
            self.emit("E-Args-N", arg.span, base, name=arg.name, key=key)
        self.emit("E-Args-0", term.span, base)

        # Body inside `let return: codom { body }`, in a frame that sees only
        # the parameters, the return identifier and the prelude.
        frame = Frame()
        for name in PRELUDE_TYPES:
            if name in self.frames[0].names:
                frame.names[name] = self.frames[0].names[name]
                frame.types[name] = PRELUDE_TYPES[name]
        for name in fn.params:
            if name in keys:
                frame.names[name] = keys[name]
                frame.types[name] = dom[name]
        outer_return = ctx.vars.pop(RETURN, None)
        result = ctx.new_reference()
        ctx.vars[RETURN] = result
        frame.names[RETURN] = RETURN
        frame.types[RETURN] = fn_type.codomain
        self.frames.append(frame)
        self.depth += 1
        try:
            self.eval(fn.body)
        finally:
            self.depth -= 1
            self.frames.pop()
            # restore: the caller's return target comes back.
            ctx.vars.pop(RETURN, None)
            if outer_return is not None:
                ctx.vars[RETURN] = outer_return
        self.emit("E-Let", term.span, base, name=RETURN, ref=f"r{result}")

        if not self.strict_rules:
            for key in keys.values():
                release_binding(key, ctx, keep=result)
        return result, "E-Call", {"ref": f"r{result}"}

    def eval_Native(self, term: Native):
        values = {}
        for name, key in self.frame.names.items():
            if name in PRELUDE_TYPES or name == RETURN:
                continue
            r = self.ctx.vars[key]
            if not readable(r, self.ctx):
                raise self.fail(ErrorKind.NOT_READABLE, term.span, name, r)
            value = self.ctx.value_of(r)
            if not isinstance(value, AtomValue):
                raise self.fail(ErrorKind.NOT_READABLE, term.span, name, r, detail="not an atom")
            values[name] = value.value
        result = NATIVE_OPS[term.op](values)

        def rhs():
            r = self.ctx.allocate(AtomValue(result), initial_capabilities(literal_type(result)))
            self.emit("E-Atom", term.span, self.depth, ref=f"r{r}", value=_literal(result))
            return r

        def left():
            return self._lookup(RETURN, term.span), self.frame.types.get(RETURN)

        self.depth += 1
        try:
            r, rule, detail = self._assign(AssignOp.MOVE, rhs, left, term.span, RETURN, None)
        finally:
            self.depth -= 1
        self.emit(rule, term.span, self.depth, **detail)
        return r, "E-Ret", {}


def _literal(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def render_value(r: RefId, ctx: EvalContext) -> str:
    """Human-readable value behind ``r``; ``<unbound>`` when it has none."""
    if ctx.refs.get(r, NULL) == NULL:
        return "<unbound>"
    return _render(ctx.refs[r], ctx, set())


def _render(loc: int, ctx: EvalContext, active: set) -> str:
    value = ctx.mem.get(loc)
    if isinstance(value, AtomValue):
        return _literal(value.value)
    if isinstance(value, Function):
        return "<fun(" + ", ".join(value.params) + ")>"
    if isinstance(value, Record):
        if loc in active:
            return "<cycle>"
        active.add(loc)
        parts = []
        for name, field_ref in value.fields:
            field_loc = ctx.refs.get(field_ref, NULL)
            text = "<unbound>" if field_loc == NULL else _render(field_loc, ctx, active)
            parts.append(f"{name}: {text}")
        active.discard(loc)
        return "{" + ", ".join(parts) + "}"
    return "<undefined>"


def evaluate(
    env: TypeEnv,
    ctx: Optional[EvalContext],
    term: Term,
    *,
    strict_rules: bool = False,
    trace: bool = True,
) -> EvalOutcome:
    """Evaluate ``term`` in ``ctx`` (a fresh context with the prelude if None)."""
    evaluator = Evaluator(env, ctx, strict_rules=strict_rules, trace=trace, prelude=ctx is None)
    return evaluator.run(term)
