"""Flowcharts over natural-number locations, with Algol-style procedures.

A flowchart is declarations plus boxes (assignments or procedure calls)
and tests wired together by nodes.  Procedure-free flowcharts get two
semantics, operational (run the machine) and declarative (close a
node-indexed matrix of relations); both yield the same relation on data
states.  Procedure calls are executed by body replacement: formals are
replaced by the actual expressions, clashing callee locals are renamed,
and the expanded body runs in the caller's environment overlaid by the
callee's declarations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Union

from .core import FreshNames, LambdaMechError, Relation, VarOrder, VarTuple


class FlowchartError(LambdaMechError):
    pass


class MultipleEntry(FlowchartError):
    pass


class StartIsExit(FlowchartError):
    pass


class HaltIsEntry(FlowchartError):
    pass


class DanglingNode(FlowchartError):
    pass


class DeadEndNode(FlowchartError):
    pass


class UndeclaredIdentifier(FlowchartError):
    pass


class EvalError(FlowchartError):
    pass


class UnknownProcedure(FlowchartError):
    pass


class ArityMismatch(FlowchartError):
    pass


class NonIdentifierActualForAssignedFormal(FlowchartError):
    pass


class ProcedureActual(FlowchartError):
    """A procedure name passed as an actual parameter (not supported)."""


class DuplicateProcedure(FlowchartError):
    pass


class FormalMismatch(FlowchartError):
    pass


# -- expressions ---------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class BinOp:
    """``+`` or ``-``; subtraction truncates at zero."""

    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Ident, BinOp]


@dataclass(frozen=True)
class Cmp:
    op: str  # "==" or "<"
    left: Expr
    right: Expr


@dataclass(frozen=True)
class BNot:
    body: "BoolExpr"


@dataclass(frozen=True)
class BAnd:
    left: "BoolExpr"
    right: "BoolExpr"


BoolExpr = Union[Cmp, BNot, BAnd]


def eval_expr(e, lookup) -> int:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Ident):
        return lookup(e.name)
    if isinstance(e, BinOp):
        a, b = eval_expr(e.left, lookup), eval_expr(e.right, lookup)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return max(a - b, 0)
        raise EvalError(f"unknown operator {e.op!r}")
    raise TypeError(f"not an expression: {e!r}")


def eval_bool(b, lookup) -> bool:
    if isinstance(b, Cmp):
        x, y = eval_expr(b.left, lookup), eval_expr(b.right, lookup)
        if b.op == "==":
            return x == y
        if b.op == "<":
            return x < y
        raise EvalError(f"unknown comparison {b.op!r}")
    if isinstance(b, BNot):
        return not eval_bool(b.body, lookup)
    if isinstance(b, BAnd):
        return eval_bool(b.left, lookup) and eval_bool(b.right, lookup)
    raise TypeError(f"not a boolean expression: {b!r}")


def idents(e) -> set:
    """Location identifiers occurring in an expression, condition or statement."""
    if isinstance(e, Num):
        return set()
    if isinstance(e, Ident):
        return {e.name}
    if isinstance(e, (BinOp, Cmp)):
        return idents(e.left) | idents(e.right)
    if isinstance(e, BNot):
        return idents(e.body)
    if isinstance(e, BAnd):
        return idents(e.left) | idents(e.right)
    if isinstance(e, Assign):
        return {e.lhs} | idents(e.rhs)
    if isinstance(e, Call):
        out = set()
        for a in e.actuals:
            out |= idents(a)
        return out
    raise TypeError(f"cannot collect identifiers of {e!r}")


def rename_expr(e, sub: dict):
    """Replace identifiers by expressions, at syntax-tree level."""
    if isinstance(e, Num):
        return e
    if isinstance(e, Ident):
        return sub.get(e.name, e)
    if isinstance(e, BinOp):
        return BinOp(e.op, rename_expr(e.left, sub), rename_expr(e.right, sub))
    if isinstance(e, Cmp):
        return Cmp(e.op, rename_expr(e.left, sub), rename_expr(e.right, sub))
    if isinstance(e, BNot):
        return BNot(rename_expr(e.body, sub))
    if isinstance(e, BAnd):
        return BAnd(rename_expr(e.left, sub), rename_expr(e.right, sub))
    raise TypeError(f"not an expression: {e!r}")


# -- statements and flowcharts -------------------------------------------------

@dataclass(frozen=True)
class Assign:
    lhs: str
    rhs: Expr


@dataclass(frozen=True)
class Call:
    proc: str
    actuals: tuple

    def __post_init__(self):
        object.__setattr__(self, "actuals", tuple(self.actuals))


@dataclass(frozen=True)
class Box:
    entry: str
    stmt: Union[Assign, Call]
    exit: str


@dataclass(frozen=True)
class Test:
    entry: str
    cond: BoolExpr
    pos: str
    neg: str


@dataclass(frozen=True)
class Flowchart:
    """``<D, N, B, T>`` plus start and halt nodes.

    ``nodes`` defaults to every node mentioned by a box, test, start or halt.
    """

    decls: tuple
    boxes: tuple
    tests: tuple
    start: str
    halt: str
    nodes: frozenset | None = None

    def __post_init__(self):
        object.__setattr__(self, "decls", tuple(self.decls))
        object.__setattr__(self, "boxes", tuple(self.boxes))
        object.__setattr__(self, "tests", tuple(self.tests))
        if self.nodes is not None:
            object.__setattr__(self, "nodes", frozenset(self.nodes))

    @cached_property
    def all_nodes(self) -> frozenset:
        if self.nodes is not None:
            return self.nodes
        out = {self.start, self.halt}
        for b in self.boxes:
            out |= {b.entry, b.exit}
        for t in self.tests:
            out |= {t.entry, t.pos, t.neg}
        return frozenset(out)

    @cached_property
    def entries(self) -> dict:
        """Map from entry node to its box or test (first one wins)."""
        out = {}
        for item in self.boxes + self.tests:
            out.setdefault(item.entry, item)
        return out

    def has_calls(self) -> bool:
        return any(isinstance(b.stmt, Call) for b in self.boxes)

    def identifiers(self) -> set:
        out = set()
        for b in self.boxes:
            out |= idents(b.stmt)
        for t in self.tests:
            out |= idents(t.cond)
        return out

    def assigned(self) -> set:
        return {b.stmt.lhs for b in self.boxes if isinstance(b.stmt, Assign)}


@dataclass(frozen=True)
class Procedure:
    """Declarations of locations and procedures, then a body.

    The locations are ``body.decls``; ``formals`` enumerates the body's
    identifiers that are not declared locally.
    """

    body: Flowchart
    procs: tuple = ()
    formals: VarOrder = VarOrder()

    def __post_init__(self):
        object.__setattr__(self, "procs", tuple(self.procs))
        object.__setattr__(self, "formals", VarOrder(self.formals))

    @property
    def locations(self) -> tuple:
        return self.body.decls


@dataclass(frozen=True)
class ProcDecl:
    name: str
    proc: Procedure


def validate(fc: Flowchart, params=()) -> None:
    """Check the structural constraints on ``fc``.

    Identifiers in ``params`` count as declared (formal parameters).
    """
    seen = set()
    for item in fc.boxes + fc.tests:
        if item.entry in seen:
            raise MultipleEntry(f"node {item.entry!r} is the entry of more than one box or test")
        seen.add(item.entry)
    exits = set()
    for b in fc.boxes:
        exits.add(b.exit)
    for t in fc.tests:
        exits |= {t.pos, t.neg}
    if fc.start in exits:
        raise StartIsExit(f"start node {fc.start!r} is an exit node")
    if fc.halt in seen:
        raise HaltIsEntry(f"halt node {fc.halt!r} is an entry node")
    referenced = seen | exits | {fc.start, fc.halt}
    missing = referenced - fc.all_nodes
    if missing:
        raise DanglingNode(f"nodes {sorted(missing)} are not declared")
    for n in sorted(exits | {fc.start}):
        if n != fc.halt and n not in seen:
            raise DeadEndNode(f"node {n!r} has no box or test and is not the halt node")
    undeclared = fc.identifiers() - set(fc.decls) - set(params)
    if undeclared:
        raise UndeclaredIdentifier(f"undeclared identifiers {sorted(undeclared)}")


def validate_procedure(proc: Procedure, visible=frozenset()) -> None:
    """Validate ``proc`` and its nested procedures recursively.

    ``visible`` holds the procedure names in scope where ``proc`` is declared.
    """
    validate(proc.body, proc.formals)
    overlap = set(proc.formals) & set(proc.locations)
    if overlap:
        raise FormalMismatch(f"{sorted(overlap)} are both formals and local declarations")
    free = proc.body.identifiers() - set(proc.locations)
    if free != set(proc.formals):
        raise FormalMismatch(
            f"formals {tuple(proc.formals)} do not enumerate the undeclared identifiers {sorted(free)}")
    names = [d.name for d in proc.procs]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise DuplicateProcedure(f"procedures {sorted(dup)} declared more than once")
    scope = set(visible) | set(names)
    for b in proc.body.boxes:
        if isinstance(b.stmt, Call):
            if b.stmt.proc in proc.formals:
                raise ProcedureActual(f"formal {b.stmt.proc!r} used as a procedure")
            if b.stmt.proc not in scope:
                raise UnknownProcedure(f"procedure {b.stmt.proc!r} is not in scope")
    for d in proc.procs:
        validate_procedure(d.proc, scope)


# -- operational semantics of procedure-free flowcharts ------------------------

@dataclass(frozen=True)
class MachineState:
    control: str
    data: VarTuple


def _lookup_in(data):
    def lookup(name):
        try:
            return data[name]
        except KeyError:
            raise EvalError(f"identifier {name!r} has no location") from None
    return lookup


def step(fc: Flowchart, s: MachineState) -> MachineState | None:
    """One transition, or None at the halt node."""
    if s.control == fc.halt:
        return None
    item = fc.entries.get(s.control)
    if item is None:
        raise EvalError(f"node {s.control!r} has no successor")
    lookup = _lookup_in(s.data)
    if isinstance(item, Test):
        nxt = item.pos if eval_bool(item.cond, lookup) else item.neg
        return MachineState(nxt, s.data)
    if isinstance(item.stmt, Call):
        raise EvalError("procedure calls need run_program")
    value = eval_expr(item.stmt.rhs, lookup)
    if item.stmt.lhs not in s.data:
        raise EvalError(f"identifier {item.stmt.lhs!r} has no location")
    return MachineState(item.exit, s.data.update(item.stmt.lhs, value))


@dataclass(frozen=True)
class Halted:
    data: VarTuple
    steps: int


@dataclass(frozen=True)
class Timeout:
    steps: int
    state: MachineState | None = None


@dataclass(frozen=True)
class DepthLimit:
    depth: int
    steps: int


def run(fc: Flowchart, d0, max_steps: int = 10000) -> Halted | Timeout:
    s = MachineState(fc.start, VarTuple(d0))
    for steps in range(max_steps + 1):
        nxt = step(fc, s)
        if nxt is None:
            return Halted(s.data, steps)
        if steps == max_steps:
            break
        s = nxt
    return Timeout(max_steps, s)


def data_states(decls, bound: int):
    names = sorted(decls)
    for values in product(range(bound), repeat=len(names)):
        yield VarTuple(zip(names, values))


def _in_range(data: VarTuple, bound: int) -> bool:
    return all(v < bound for v in data.values())


def operational_relation(fc: Flowchart, bound: int) -> Relation:
    """Pairs ``(d, d')`` of data states over ``{0..bound-1}`` joined by a computation.

    A computation that passes through an out-of-range state has no
    counterpart in the bounded state space and contributes no pair.
    """
    if fc.has_calls():
        raise EvalError("operational_relation covers procedure-free flowcharts only")
    budget = len(fc.all_nodes) * bound ** len(fc.decls) + 1
    pairs = set()
    for d0 in data_states(fc.decls, bound):
        s = MachineState(fc.start, d0)
        for _ in range(budget + 1):
            if not _in_range(s.data, bound):
                break
            nxt = step(fc, s)
            if nxt is None:
                pairs.add((d0, s.data))
                break
            s = nxt
    return Relation.ordinal(2, pairs)


# -- declarative semantics ------------------------------------------------------

def relation_matrix(fc: Flowchart, bound: int) -> dict:
    """Node-indexed matrix of relations on bounded data states.

    ``matrix[(j, i)]`` is the relation carried from node ``i`` to node
    ``j``.  Missing entries are empty.
    """
    if fc.has_calls():
        raise EvalError("relation_matrix covers procedure-free flowcharts only")
    states = list(data_states(fc.decls, bound))
    matrix: dict = {}

    def add(j, i, pairs):
        matrix[(j, i)] = matrix.get((j, i), frozenset()) | frozenset(pairs)

    for b in fc.boxes:
        a = b.stmt
        pairs = []
        for d in states:
            d2 = d.update(a.lhs, eval_expr(a.rhs, _lookup_in(d)))
            if _in_range(d2, bound):
                pairs.append((d, d2))
        add(b.exit, b.entry, pairs)
    for t in fc.tests:
        pos = [d for d in states if eval_bool(t.cond, _lookup_in(d))]
        neg = [d for d in states if not eval_bool(t.cond, _lookup_in(d))]
        add(t.pos, t.entry, ((d, d) for d in pos))
        add(t.neg, t.entry, ((d, d) for d in neg))
    return matrix


def declarative_relation(fc: Flowchart, bound: int) -> Relation:
    """Least solution of ``R[start] = id``, ``R[j] >= M[j,i] o R[i]``; returns ``R[halt]``."""
    matrix = relation_matrix(fc, bound)
    succ: dict = {}
    for (j, i), pairs in matrix.items():
        step_of = succ.setdefault(i, {}).setdefault(j, {})
        for d, d2 in pairs:
            step_of.setdefault(d, []).append(d2)
    reach = {n: set() for n in fc.all_nodes}
    reach[fc.start] = {(d, d) for d in data_states(fc.decls, bound)}
    work = [(fc.start, set(reach[fc.start]))]
    while work:
        i, delta = work.pop()
        for j, fn in succ.get(i, {}).items():
            new = {(d0, d2) for d0, d1 in delta for d2 in fn.get(d1, ())} - reach[j]
            if new:
                reach[j] |= new
                work.append((j, new))
    return Relation.ordinal(2, reach[fc.halt])


# -- procedures -------------------------------------------------------------------

class Store:
    """Memory cells shared by every frame of one run."""

    def __init__(self):
        self.cells: dict = {}
        self._next = 0

    def alloc(self, value: int = 0) -> int:
        cell = self._next
        self._next += 1
        self.cells[cell] = value
        return cell


@dataclass
class Closure:
    proc: Procedure
    scope: dict  # procedures visible where ``proc`` was declared


@dataclass
class Environment:
    locations: dict
    procedures: dict
    store: Store = field(default_factory=Store)

    def lookup(self, name: str) -> int:
        try:
            return self.store.cells[self.locations[name]]
        except KeyError:
            raise EvalError(f"identifier {name!r} has no location") from None

    def assign(self, name: str, value: int) -> None:
        try:
            self.store.cells[self.locations[name]] = value
        except KeyError:
            raise EvalError(f"identifier {name!r} has no location") from None

    def data(self, names) -> VarTuple:
        return VarTuple((n, self.lookup(n)) for n in names)


def _closures(procs, outer: dict) -> dict:
    """Closures for sibling declarations; each sees the others and itself."""
    scope = dict(outer)
    for d in procs:
        scope[d.name] = Closure(d.proc, scope)
    return scope


def _subst_stmt(stmt, sub: dict, lhs_names: dict):
    if isinstance(stmt, Assign):
        return Assign(lhs_names.get(stmt.lhs, stmt.lhs), rename_expr(stmt.rhs, sub))
    return Call(stmt.proc, tuple(rename_expr(a, sub) for a in stmt.actuals))


def expand_call(env: Environment, call: Call, supply: FreshNames | None = None,
                rename_all: bool = False):
    """Body replacement for ``call``; returns the modified body and its environment.

    Formals are replaced by the actual expressions.  Callee locals that
    clash with identifiers of the actuals are renamed fresh (all locals,
    with ``rename_all``).  The new environment is the caller's with the
    callee's declarations laid over it.
    """
    if supply is None:
        supply = FreshNames()
    closure = env.procedures.get(call.proc)
    if closure is None:
        raise UnknownProcedure(f"procedure {call.proc!r} is not in scope")
    proc = closure.proc
    body = proc.body
    if len(call.actuals) != len(proc.formals):
        raise ArityMismatch(
            f"{call.proc} takes {len(proc.formals)} parameters, given {len(call.actuals)}")
    for a in call.actuals:
        if isinstance(a, Ident) and a.name in env.procedures and a.name not in env.locations:
            raise ProcedureActual(f"procedure {a.name!r} passed as a parameter to {call.proc}")
    assigned = body.assigned()
    sub = dict(zip(proc.formals, call.actuals))
    lhs_names = {}
    for x, a in sub.items():
        if x in assigned:
            if not isinstance(a, Ident):
                raise NonIdentifierActualForAssignedFormal(
                    f"formal {x!r} of {call.proc} is assigned, so its actual must be a location")
            lhs_names[x] = a.name

    inserted = set()
    for a in call.actuals:
        inserted |= idents(a)
    occupied = inserted | body.identifiers() | set(body.decls) | set(env.locations)
    locals_ = []
    for name in body.decls:
        if rename_all or name in inserted:
            new = supply.fresh(name, occupied)
            occupied.add(new)
            sub[name] = Ident(new)
            lhs_names[name] = new
            locals_.append(new)
        else:
            locals_.append(name)

    new_body = Flowchart(
        tuple(locals_),
        tuple(Box(b.entry, _subst_stmt(b.stmt, sub, lhs_names), b.exit) for b in body.boxes),
        tuple(Test(t.entry, rename_expr(t.cond, sub), t.pos, t.neg) for t in body.tests),
        body.start,
        body.halt,
        body.nodes,
    )
    locations = dict(env.locations)
    for name in locals_:
        locations[name] = env.store.alloc(0)
    procedures = {**env.procedures, **_closures(proc.procs, closure.scope)}
    return new_body, Environment(locations, procedures, env.store)


@dataclass
class _Frame:
    body: Flowchart
    control: str
    env: Environment


def run_program(main: Procedure, d0=None, max_steps: int = 10000, max_depth: int = 256,
                rename_all: bool = False):
    """Execute ``main``; each call box expands its callee and runs it to halt.

    Returns Halted with main's data state, Timeout, or DepthLimit.
    """
    if main.formals:
        raise FormalMismatch("the main procedure takes no formals")
    validate_procedure(main)
    d0 = dict(d0 or {})
    unknown = set(d0) - set(main.locations)
    if unknown:
        raise UndeclaredIdentifier(f"initial values for undeclared {sorted(unknown)}")
    store = Store()
    env = Environment({n: store.alloc(d0.get(n, 0)) for n in main.locations},
                      _closures(main.procs, {}), store)
    supply = FreshNames()
    stack = [_Frame(main.body, main.body.start, env)]
    steps = 0
    while True:
        frame = stack[-1]
        body = frame.body
        if frame.control == body.halt:
            stack.pop()
            if not stack:
                return Halted(env.data(main.locations), steps)
            continue
        if steps >= max_steps:
            return Timeout(steps)
        item = body.entries.get(frame.control)
        if item is None:
            raise EvalError(f"node {frame.control!r} has no successor")
        steps += 1
        if isinstance(item, Test):
            frame.control = item.pos if eval_bool(item.cond, frame.env.lookup) else item.neg
        elif isinstance(item.stmt, Assign):
            frame.env.assign(item.stmt.lhs, eval_expr(item.stmt.rhs, frame.env.lookup))
            frame.control = item.exit
        else:
            if len(stack) > max_depth:
                return DepthLimit(len(stack) - 1, steps)
            new_body, new_env = expand_call(frame.env, item.stmt, supply, rename_all)
            frame.control = item.exit
            stack.append(_Frame(new_body, new_body.start, new_env))
