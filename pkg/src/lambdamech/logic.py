"""First-order terms and formulas over finite interpretations.

Covers Tarski-style evaluation, defining new function symbols from terms,
and predicate extensions: sets of possibly mutually recursive definitions
``p := \\(x, ...). F_0 | ... | F_m`` whose meaning is the least model,
computed by Kleene iteration from the all-empty interpretation.
"""
from __future__ import annotations

from collections.abc import Callable, Iterator, Mapping
from dataclasses import dataclass, field, replace
from typing import Union

from .core import (
    TOP,
    Domain,
    LambdaMechError,
    NameMismatch,
    Relation,
    VarOrder,
    VarTuple,
    all_var_tuples,
    invert_tuple,
    lift_function,
    lift_relation,
)


class UnboundVariable(LambdaMechError):
    pass


class UnknownSymbol(LambdaMechError):
    pass


class ArityMismatch(LambdaMechError):
    pass


class RecursiveDefinition(LambdaMechError):
    pass


class DuplicateDefinedPredicate(LambdaMechError):
    pass


class FreeVarEnumerationMismatch(LambdaMechError):
    pass


class IllegalBodyConnective(LambdaMechError):
    pass


class DefinedSymbolInterpreted(LambdaMechError):
    pass


class RoundLimit(LambdaMechError):
    pass


# -- syntax -----------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    symbol: str


@dataclass(frozen=True)
class FnApp:
    symbol: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


Term = Union[Var, Const, FnApp]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class And:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError("empty conjunction")


@dataclass(frozen=True)
class Or:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError("empty disjunction")


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class If:
    """``consequent if antecedent``."""

    consequent: "Formula"
    antecedent: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Atom, And, Or, Not, If, Exists, Forall]

TRUE = Atom("=", (Const("0"), Const("0")))


def term_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Const):
        return frozenset()
    out = frozenset()
    for a in t.args:
        out |= term_vars(a)
    return out


def free_vars(f) -> frozenset:
    """Free variables of a term or formula."""
    if isinstance(f, (Var, Const, FnApp)):
        return term_vars(f)
    if isinstance(f, Atom):
        out = frozenset()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, (And, Or)):
        out = frozenset()
        for p in f.parts:
            out |= free_vars(p)
        return out
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, If):
        return free_vars(f.consequent) | free_vars(f.antecedent)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a term or formula: {f!r}")


def fn_symbols(t: Term) -> set:
    if isinstance(t, FnApp):
        out = {t.symbol}
        for a in t.args:
            out |= fn_symbols(a)
        return out
    return set()


def _walk_atoms(f) -> Iterator[Atom]:
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            yield from _walk_atoms(p)
    elif isinstance(f, Not):
        yield from _walk_atoms(f.body)
    elif isinstance(f, If):
        yield from _walk_atoms(f.consequent)
        yield from _walk_atoms(f.antecedent)
    elif isinstance(f, (Exists, Forall)):
        yield from _walk_atoms(f.body)


def _walk_terms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, FnApp):
        for a in t.args:
            yield from _walk_terms(a)


# -- interpretations --------------------------------------------------------

@dataclass(frozen=True)
class Interpretation:
    """Domain plus meanings for function, predicate and constant symbols.

    ``fns`` maps a symbol to ``(arity, callable on a tuple)``, ``preds``
    maps a symbol to an ordinal-indexed ``Relation``.  On bounded-nat
    domains, numeral constants not listed in ``consts`` denote themselves
    (or TOP when out of range).
    """

    domain: Domain
    fns: Mapping = field(default_factory=dict)
    preds: Mapping = field(default_factory=dict)
    consts: Mapping = field(default_factory=dict)

    def const(self, symbol: str):
        if symbol in self.consts:
            return self.consts[symbol]
        if self.domain.bound is not None and symbol.isdigit():
            return self.domain.saturate(int(symbol))
        raise UnknownSymbol(f"constant {symbol!r} is not interpreted")

    def has_const(self, symbol: str) -> bool:
        return symbol in self.consts or (self.domain.bound is not None and symbol.isdigit())

    def with_preds(self, extra: Mapping[str, Relation]) -> "Interpretation":
        return replace(self, preds={**self.preds, **extra})

    def with_fn(self, symbol: str, arity: int, fn: Callable) -> "Interpretation":
        return replace(self, fns={**self.fns, symbol: (arity, fn)})


def identity_relation(domain: Domain) -> Relation:
    return Relation.ordinal(2, ((d, d) for d in domain))


def arithmetic(bound: int) -> Interpretation:
    """Bounded naturals with saturating ``s``, ``+``, ``*`` and ``=``, ``<``.

    TOP absorbs every function and satisfies no comparison except TOP = TOP.
    """
    dom = Domain.bounded(bound)

    def lift2(op):
        def fn(args):
            a, b = args
            if a is TOP or b is TOP:
                return TOP
            return dom.saturate(op(a, b))
        return fn

    def succ(args):
        (a,) = args
        return TOP if a is TOP else dom.saturate(a + 1)

    fns = {
        "s": (1, succ),
        "+": (2, lift2(lambda a, b: a + b)),
        "*": (2, lift2(lambda a, b: a * b)),
    }
    less = Relation.ordinal(2, ((a, b) for a in range(bound) for b in range(bound) if a < b))
    preds = {"=": identity_relation(dom), "<": less}
    return Interpretation(dom, fns, preds, {})


def atoms_interpretation(names) -> Interpretation:
    """Enumerated domain; each atom name is a constant denoting itself."""
    dom = Domain.atoms(names)
    return Interpretation(dom, {}, {"=": identity_relation(dom)}, {a.name: a for a in dom})


# -- evaluation ---------------------------------------------------------------

def eval_term(interp: Interpretation, alpha: Mapping, t: Term):
    return _compile_term(interp, t)(alpha)


def eval_formula(interp: Interpretation, alpha: Mapping, f: Formula) -> bool:
    return _compile(interp, f)(dict(alpha))


def denotation(interp: Interpretation, f: Formula) -> Relation:
    """All assignments over the free variables of ``f`` that satisfy it."""
    names = free_vars(f)
    test = _compile(interp, f)
    rows = (a for a in all_var_tuples(names, interp.domain) if test(dict(a)))
    return Relation(frozenset(names), frozenset(rows))


# Terms and formulas are compiled to closures over an environment dict;
# symbol lookups and arity checks happen once, at compile time.

def _compile_term(interp: Interpretation, t: Term):
    if isinstance(t, Var):
        name = t.name

        def var(env):
            try:
                return env[name]
            except KeyError:
                raise UnboundVariable(f"variable {name!r} has no value") from None
        return var
    if isinstance(t, Const):
        value = interp.const(t.symbol)
        return lambda env: value
    if isinstance(t, FnApp):
        try:
            arity, fn = interp.fns[t.symbol]
        except KeyError:
            raise UnknownSymbol(f"function {t.symbol!r} is not interpreted") from None
        if arity != len(t.args):
            raise ArityMismatch(f"{t.symbol} takes {arity} arguments, given {len(t.args)}")
        args = [_compile_term(interp, a) for a in t.args]
        if len(args) == 1:
            a0 = args[0]
            return lambda env: fn((a0(env),))
        if len(args) == 2:
            a0, a1 = args
            return lambda env: fn((a0(env), a1(env)))
        return lambda env: fn(tuple(a(env) for a in args))
    raise TypeError(f"not a term: {t!r}")


def _compile(interp: Interpretation, f):
    if isinstance(f, Atom):
        try:
            rel = interp.preds[f.pred]
        except KeyError:
            raise UnknownSymbol(f"predicate {f.pred!r} is not interpreted") from None
        if rel.arity != len(f.args):
            raise ArityMismatch(f"{f.pred} takes {rel.arity} arguments, given {len(f.args)}")
        rows = rel.rows
        args = [_compile_term(interp, a) for a in f.args]
        if len(args) == 1:
            a0 = args[0]
            return lambda env: (a0(env),) in rows
        if len(args) == 2:
            a0, a1 = args
            return lambda env: (a0(env), a1(env)) in rows
        return lambda env: tuple(a(env) for a in args) in rows
    if isinstance(f, And):
        parts = [_compile(interp, p) for p in f.parts]
        if len(parts) == 2:
            p0, p1 = parts
            return lambda env: p0(env) and p1(env)
        return lambda env: all(p(env) for p in parts)
    if isinstance(f, Or):
        parts = [_compile(interp, p) for p in f.parts]
        if len(parts) == 2:
            p0, p1 = parts
            return lambda env: p0(env) or p1(env)
        return lambda env: any(p(env) for p in parts)
    if isinstance(f, Not):
        body = _compile(interp, f.body)
        return lambda env: not body(env)
    if isinstance(f, If):
        cons, ante = _compile(interp, f.consequent), _compile(interp, f.antecedent)
        return lambda env: cons(env) or not ante(env)
    if isinstance(f, (Exists, Forall)):
        body = _compile(interp, f.body)
        var, carrier = f.var, tuple(interp.domain)
        want = isinstance(f, Exists)
        missing = object()

        def quantified(env):
            # env is mutated per witness and restored before returning
            saved = env.get(var, missing)
            result = not want
            for d in carrier:
                env[var] = d
                if body(env) == want:
                    result = want
                    break
            if saved is missing:
                del env[var]
            else:
                env[var] = saved
            return result
        return quantified
    raise TypeError(f"not a formula: {f!r}")


def term_function(interp: Interpretation, t: Term) -> Callable[[VarTuple], object]:
    """The binding of ``t``: a function of assignments to its variables."""
    return lambda chi: eval_term(interp, chi, t)


def extend_with_function(interp: Interpretation, symbol: str, order, t: Term) -> Interpretation:
    """Interpret ``symbol`` as ``\\(order). t``; the original is left untouched."""
    if symbol in interp.fns or symbol in fn_symbols(t):
        raise RecursiveDefinition(f"{symbol!r} is already interpreted or occurs in its own body")
    order = VarOrder(order)
    names = term_vars(t)
    if set(order) != names:
        raise NameMismatch(f"order {tuple(order)} does not enumerate the variables {sorted(names)}")
    return interp.with_fn(symbol, len(order), lift_function(order, term_function(interp, t), names))


# -- predicate extensions -----------------------------------------------------

@dataclass(frozen=True)
class Definition:
    pred: str
    order: tuple
    disjuncts: tuple

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        object.__setattr__(self, "disjuncts", tuple(self.disjuncts))

    @property
    def body(self) -> Formula:
        return Or(self.disjuncts)


@dataclass(frozen=True)
class PredicateExtension:
    defs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "defs", tuple(self.defs))

    @property
    def defined(self) -> frozenset:
        return frozenset(d.pred for d in self.defs)


@dataclass(frozen=True)
class DfpContext:
    """What every interpretation in a DFP-set shares: the base meanings."""

    base: Interpretation
    defined: frozenset

    @classmethod
    def of(cls, base: Interpretation, ext: PredicateExtension) -> "DfpContext":
        return cls(base, ext.defined)


def _check_disjunct(pred: str, f: Formula) -> None:
    while isinstance(f, Exists):
        f = f.body
    parts = f.parts if isinstance(f, And) else (f,)
    for p in parts:
        if not isinstance(p, Atom):
            raise IllegalBodyConnective(
                f"body of {pred} may only hold existentially quantified conjunctions of atoms,"
                f" found {type(p).__name__}")


def validate_extension(ctx: DfpContext, ext: PredicateExtension) -> None:
    seen = set()
    for d in ext.defs:
        if d.pred in seen:
            raise DuplicateDefinedPredicate(f"{d.pred!r} is defined more than once")
        seen.add(d.pred)
    for p in seen:
        if p in ctx.base.preds:
            raise DefinedSymbolInterpreted(f"{p!r} is both defined and interpreted by the base")
    arities = {d.pred: len(d.order) for d in ext.defs}
    for d in ext.defs:
        if not d.disjuncts:
            raise IllegalBodyConnective(f"definition of {d.pred} has an empty body")
        for f in d.disjuncts:
            _check_disjunct(d.pred, f)
        fv = free_vars(d.body)
        if len(set(d.order)) != len(d.order) or set(d.order) != fv:
            raise FreeVarEnumerationMismatch(
                f"{d.pred}: {tuple(d.order)} is not an enumeration of the free variables {sorted(fv)}")
        for atom in _walk_atoms(d.body):
            if atom.pred in arities:
                arity = arities[atom.pred]
            elif atom.pred in ctx.base.preds:
                arity = ctx.base.preds[atom.pred].arity
            else:
                raise UnknownSymbol(f"predicate {atom.pred!r} is neither defined nor interpreted")
            if arity != len(atom.args):
                raise ArityMismatch(f"{atom.pred} takes {arity} arguments, given {len(atom.args)}")
            for arg in atom.args:
                for t in _walk_terms(arg):
                    if isinstance(t, FnApp):
                        if t.symbol not in ctx.base.fns:
                            raise UnknownSymbol(f"function {t.symbol!r} is not interpreted")
                        if ctx.base.fns[t.symbol][0] != len(t.args):
                            raise ArityMismatch(f"{t.symbol} takes {ctx.base.fns[t.symbol][0]} arguments")
                    elif isinstance(t, Const) and not ctx.base.has_const(t.symbol):
                        raise UnknownSymbol(f"constant {t.symbol!r} is not interpreted")


def _immediate(ctx: DfpContext, ext: PredicateExtension, cand: Mapping) -> dict:
    """One application of the extension: lifted body denotations under base+cand."""
    interp = ctx.base.with_preds(cand)
    return {d.pred: lift_relation(d.order, denotation(interp, d.body)) for d in ext.defs}


def _check_candidate(ext: PredicateExtension, cand: Mapping) -> None:
    for d in ext.defs:
        if d.pred not in cand:
            raise ArityMismatch(f"candidate assigns no relation to {d.pred!r}")
        if cand[d.pred].arity != len(d.order) or not isinstance(cand[d.pred].index, int):
            raise ArityMismatch(f"candidate for {d.pred} must be {len(d.order)}-ary")


def is_model(ctx: DfpContext, cand: Mapping, ext: PredicateExtension) -> bool:
    _check_candidate(ext, cand)
    produced = _immediate(ctx, ext, cand)
    return all(produced[p] <= cand[p] for p in produced)


def kleene_chain(ctx: DfpContext, ext: PredicateExtension) -> Iterator[dict]:
    """Candidates of the iteration from all-empty, ending at the fixpoint.

    Yields the all-empty start, then each changed candidate.
    """
    cand = {d.pred: Relation.ordinal(len(d.order)) for d in ext.defs}
    yield cand
    if not ext.defs:
        return
    while True:
        nxt = _immediate(ctx, ext, cand)
        if nxt == cand:
            return
        cand = nxt
        yield cand


def minimal_model(ctx: DfpContext, ext: PredicateExtension, max_rounds: int = 10000) -> dict:
    """Least model of ``ext`` over ``ctx``; raises RoundLimit past ``max_rounds``."""
    result, _ = minimal_model_rounds(ctx, ext, max_rounds)
    return result


def minimal_model_rounds(ctx: DfpContext, ext: PredicateExtension, max_rounds: int = 10000):
    """``minimal_model`` plus the number of rounds that changed a relation."""
    validate_extension(ctx, ext)
    rounds = -1
    for rounds, cand in enumerate(kleene_chain(ctx, ext)):
        if rounds > max_rounds:
            raise RoundLimit(f"no fixpoint within {max_rounds} rounds")
    return cand, rounds


def corresponding_formula(ext: PredicateExtension) -> Formula:
    """Conjunction over definitions of ``forall xs. p(xs) if body``."""
    if not ext.defs:
        return TRUE
    parts = []
    for d in ext.defs:
        h = If(Atom(d.pred, tuple(Var(x) for x in d.order)), d.body)
        for x in reversed(d.order):
            h = Forall(x, h)
        parts.append(h)
    return And(parts)


def holds(interp: Interpretation, f: Formula) -> bool:
    """Truth of a closed formula."""
    return VarTuple() in denotation(interp, f).rows


def apply_order(order, rel: Relation) -> Relation:
    """Name-index an ordinal relation via ``order`` (inverse of lift_relation)."""
    return Relation(frozenset(order), frozenset(invert_tuple(order, r) for r in rel.rows))
