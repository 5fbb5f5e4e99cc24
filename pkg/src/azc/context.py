"""Evaluation context: variable, reference, memory and capability tables.

References are positive integers, locations non-negative integers with ``0``
reserved for the null location.  Neither is ever reused.  The context is a
mutable object owned by a single evaluation; :meth:`EvalContext.copy` takes a
snapshot when one is needed.

The predicates below follow their set-theoretic definitions.  Two reverse
indexes (location -> references bound to it, reference -> record locations
holding it as a field, reference -> borrowers) keep them from scanning the
whole store; the tests check them against brute-force evaluations of the
definitions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Set, Tuple

from azc.errors import ErrorKind, EvalError
from azc.syntax.ast import NO_SPAN, FunctionType, StructType, Term
from azc.typesys import NO_CAPS, CapabilitySet, initial_capabilities, resolve

RefId = int
Location = int
NULL: Location = 0


class ReferenceState(enum.Enum):
    UNALLOCATED = "unallocated"
    UNIQUE = "unique"
    SHARED = "shared"
    BORROWED = "borrowed"
    MOVED = "moved"

    def __str__(self) -> str:
        return self.value


# ---------------------------------------------------------------------------
# Semantic values


class _Undefined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Undefined"


Undefined = _Undefined()


@dataclass(frozen=True)
class AtomValue:
    value: object

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AtomValue)
            and type(self.value) is type(other.value)
            and self.value == other.value
        )

    def __hash__(self) -> int:
        return hash((type(self.value), self.value))


@dataclass(frozen=True)
class Record:
    """Field name -> reference.  ``type`` is the instantiated structure type."""

    fields: Tuple[Tuple[str, RefId], ...]
    type: StructType

    @property
    def field_map(self) -> Dict[str, RefId]:
        return dict(self.fields)

    def refs(self) -> Iterator[RefId]:
        return (r for _, r in self.fields)


@dataclass(frozen=True)
class Function:
    """A lambda value; it closes over nothing."""

    type: FunctionType
    params: Tuple[str, ...]
    body: Term


# ---------------------------------------------------------------------------
# Context


class EvalContext:
    def __init__(self) -> None:
        self.vars: Dict[str, RefId] = {}
        self.refs: Dict[RefId, Location] = {}
        self.mem: Dict[Location, object] = {}
        self.caps: Dict[RefId, CapabilitySet] = {}
        self.ever_bound: Set[RefId] = set()
        self.next_ref = 1
        self.next_loc = 1
        self.next_name = 1
        self._loc_refs: Dict[Location, Set[RefId]] = {}
        self._field_parents: Dict[RefId, Set[Location]] = {}
        self._borrowers: Dict[RefId, Set[RefId]] = {}

    # -- allocation ----------------------------------------------------

    def fresh_ref(self) -> RefId:
        r = self.next_ref
        self.next_ref += 1
        return r

    def fresh_location(self) -> Location:
        loc = self.next_loc
        self.next_loc += 1
        return loc

    def fresh_name(self, base: str) -> str:
        """A variable name users cannot write (contains ``#``)."""
        name = f"{base}#{self.next_name}"
        self.next_name += 1
        return name

    # -- table updates (keep the indexes in sync) ----------------------

    def bind(self, r: RefId, loc: Location) -> None:
        """rho[r] := loc."""
        old = self.refs.get(r)
        if old is not None and old != NULL:
            self._loc_refs[old].discard(r)
        self.refs[r] = loc
        if loc != NULL:
            self._loc_refs.setdefault(loc, set()).add(r)
            self.ever_bound.add(r)

    def store(self, loc: Location, value: object) -> None:
        """mu[loc] := value."""
        old = self.mem.get(loc)
        if isinstance(old, Record):
            for f in old.refs():
                self._field_parents[f].discard(loc)
        self.mem[loc] = value
        if isinstance(value, Record):
            for f in value.refs():
                self._field_parents.setdefault(f, set()).add(loc)

    def set_caps(self, r: RefId, caps: CapabilitySet) -> None:
        """kappa[r] := caps."""
        old = self.caps.get(r)
        if old is not None:
            for owner in old.borrows:
                self._borrowers[owner].discard(r)
        self.caps[r] = caps
        for owner in caps.borrows:
            self._borrowers.setdefault(owner, set()).add(r)

    def new_reference(self, loc: Location = NULL, caps: CapabilitySet = NO_CAPS) -> RefId:
        r = self.fresh_ref()
        self.bind(r, loc)
        self.set_caps(r, caps)
        return r

    def allocate(self, value: object, caps: CapabilitySet) -> RefId:
        """Fresh location holding ``value`` and a fresh reference to it."""
        loc = self.fresh_location()
        self.store(loc, value)
        return self.new_reference(loc, caps)

    def value_of(self, r: RefId) -> object:
        return self.mem.get(self.refs.get(r, NULL), Undefined)

    # -- queries -------------------------------------------------------

    def containers(self, r: RefId) -> Set[RefId]:
        """All ``s`` with ``contains(s, r)``."""
        found: Set[RefId] = set()
        frontier = [r]
        seen = {r}
        while frontier:
            x = frontier.pop()
            for loc in self._field_parents.get(x, ()):
                for s in self._loc_refs.get(loc, ()):
                    found.add(s)
                    if s not in seen:
                        seen.add(s)
                        frontier.append(s)
        return found

    def copy(self) -> "EvalContext":
        other = EvalContext.__new__(EvalContext)
        other.vars = dict(self.vars)
        other.refs = dict(self.refs)
        other.mem = dict(self.mem)
        other.caps = dict(self.caps)
        other.ever_bound = set(self.ever_bound)
        other.next_ref = self.next_ref
        other.next_loc = self.next_loc
        other.next_name = self.next_name
        other._loc_refs = {k: set(v) for k, v in self._loc_refs.items()}
        other._field_parents = {k: set(v) for k, v in self._field_parents.items()}
        other._borrowers = {k: set(v) for k, v in self._borrowers.items()}
        return other

    def dump(self) -> str:
        """Deterministic rendering of the four tables, sorted by key."""
        lines = ["nu:"]
        lines += [f"  {name} = r{r}" for name, r in sorted(self.vars.items())]
        lines.append("rho:")
        lines += [f"  r{r} = l{loc}" for r, loc in sorted(self.refs.items())]
        lines.append("mu:")
        lines += [f"  l{loc} = {_raw_value(v)}" for loc, v in sorted(self.mem.items())]
        lines.append("kappa:")
        lines += [f"  r{r} = {caps}" for r, caps in sorted(self.caps.items())]
        return "\n".join(lines)


def _raw_value(value: object) -> str:
    if isinstance(value, AtomValue):
        return _atom_text(value.value)
    if isinstance(value, Record):
        return "{" + ", ".join(f"{n}: r{r}" for n, r in value.fields) + "}"
    if isinstance(value, Function):
        return "fun(" + ", ".join(value.params) + ")"
    return "undefined"


def _atom_text(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


# ---------------------------------------------------------------------------
# Predicates


def contains(s: RefId, r: RefId, ctx: EvalContext) -> bool:
    """Whether ``s`` denotes a record that (transitively) holds ``r``."""
    seen: Set[RefId] = set()
    stack = [s]
    while stack:
        x = stack.pop()
        if x in seen or x not in ctx.refs:
            continue
        seen.add(x)
        value = ctx.mem.get(ctx.refs[x])
        if not isinstance(value, Record):
            continue
        for field_ref in value.refs():
            if field_ref == r:
                return True
            stack.append(field_ref)
    return False


def readable(r: RefId, ctx: EvalContext) -> bool:
    caps = ctx.caps.get(r)
    return caps is not None and (caps.has_ro or caps.has_rw)


def writeable(r: RefId, ctx: EvalContext) -> bool:
    """``rw`` on ``r`` and on every reference to a record containing it.

    Containment may be cyclic; the recursive definition is read as its
    greatest fixed point, which reduces to the check below.
    """
    caps = ctx.caps.get(r)
    if caps is None or not caps.has_rw:
        return False
    for s in ctx.containers(r):
        s_caps = ctx.caps.get(s)
        if s_caps is None or not s_caps.has_rw:
            return False
    return True


def borrowers(r: RefId, ctx: EvalContext) -> Set[RefId]:
    """References holding ``b[r]``."""
    return set(ctx._borrowers.get(r, ()))


def shared(r: RefId, ctx: EvalContext) -> bool:
    return readable(r, ctx) and bool(ctx._borrowers.get(r))


def unique(r: RefId, ctx: EvalContext) -> bool:
    return readable(r, ctx) and not ctx._borrowers.get(r)


def classify_state(r: RefId, ctx: EvalContext) -> ReferenceState:
    caps = ctx.caps.get(r, NO_CAPS)
    if caps.borrows:
        return ReferenceState.BORROWED
    if readable(r, ctx) and ctx.refs.get(r, NULL) != NULL:
        return ReferenceState.SHARED if ctx._borrowers.get(r) else ReferenceState.UNIQUE
    return ReferenceState.MOVED if r in ctx.ever_bound else ReferenceState.UNALLOCATED


# ---------------------------------------------------------------------------
# Deep copy


def copy_value(src: Location, ctx: EvalContext, dst: Optional[Location] = None) -> Location:
    """Store a transitive copy of ``mu[src]`` at ``dst`` (fresh if omitted).

    Locations already copied are reused, so sharing and cycles in the source
    graph reappear in the copy.  Copied fields get fresh references whose
    capabilities come from the field types of the record's structure type.
    """
    if dst is None:
        dst = ctx.fresh_location()
    memo: Dict[Location, Location] = {src: dst}
    pending = [src]
    built: Dict[Location, object] = {}
    while pending:
        loc = pending.pop()
        value = ctx.mem.get(loc, Undefined)
        if value is Undefined:
            raise EvalError(ErrorKind.COPY_OF_UNDEFINED, NO_SPAN, f"l{loc}")
        if not isinstance(value, Record):
            built[memo[loc]] = value
            continue
        field_types = resolve(value.type).field_map if value.type is not None else {}
        new_fields = []
        for name, field_ref in value.fields:
            field_loc = ctx.refs.get(field_ref, NULL)
            if field_loc == NULL:
                raise EvalError(ErrorKind.COPY_OF_UNDEFINED, NO_SPAN, name, ref=field_ref)
            if field_loc not in memo:
                memo[field_loc] = ctx.fresh_location()
                pending.append(field_loc)
            caps = initial_capabilities(field_types[name]) if name in field_types else ctx.caps[field_ref]
            new_ref = ctx.new_reference(memo[field_loc], caps)
            new_fields.append((name, new_ref))
        built[memo[loc]] = Record(tuple(new_fields), value.type)
    for loc, value in built.items():
        ctx.store(loc, value)
    return dst


def deep_copy(loc: Location, ctx: EvalContext) -> Location:
    """Fresh location holding a transitive copy of ``mu[loc]``."""
    return copy_value(loc, ctx)


def release_binding(name: str, ctx: EvalContext, keep: Optional[RefId] = None) -> None:
    """End the scope of ``name``: drop it from nu and clear its reference.

    Clearing kappa hands any borrowed fragment back to its owner.  ``keep``
    names a reference that outlives the scope (the value the scope evaluates
    to); it is only unbound from the name.
    """
    r = ctx.vars.pop(name, None)
    if r is None or r == keep:
        return
    if ctx.refs.get(r, NULL) != NULL:
        ctx.bind(r, NULL)
    if not ctx.caps.get(r, NO_CAPS).empty:
        ctx.set_caps(r, NO_CAPS)
