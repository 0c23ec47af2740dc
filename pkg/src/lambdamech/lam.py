"""Untyped lambda calculus with Landin's tuple abstraction.

Terms mix single abstraction ``\\x. M`` with tuple abstraction
``\\(x, y). M`` and tuple application ``M (N1, N2)``.  Reduction is
normal order; substitution renames bound variables to avoid capture.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .core import FreshNames, LambdaMechError, VarOrder


class ArityMismatch(LambdaMechError):
    pass


class NotCurriable(LambdaMechError):
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    fun: "LamTerm"
    arg: "LamTerm"


@dataclass(frozen=True)
class Abs:
    var: str
    body: "LamTerm"


@dataclass(frozen=True)
class TupleAbs:
    order: VarOrder
    body: "LamTerm"

    def __post_init__(self):
        object.__setattr__(self, "order", VarOrder(self.order))


@dataclass(frozen=True)
class TupleApp:
    fun: "LamTerm"
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


LamTerm = Union[Var, App, Abs, TupleAbs, TupleApp]


def free_vars(t: LamTerm) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, App):
        return free_vars(t.fun) | free_vars(t.arg)
    if isinstance(t, Abs):
        return free_vars(t.body) - {t.var}
    if isinstance(t, TupleAbs):
        return free_vars(t.body) - set(t.order)
    if isinstance(t, TupleApp):
        out = free_vars(t.fun)
        for a in t.args:
            out |= free_vars(a)
        return out
    raise TypeError(f"not a lambda term: {t!r}")


def all_names(t: LamTerm) -> set:
    """Every name occurring in ``t``, free or bound."""
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        return all_names(t.fun) | all_names(t.arg)
    if isinstance(t, Abs):
        return all_names(t.body) | {t.var}
    if isinstance(t, TupleAbs):
        return all_names(t.body) | set(t.order)
    if isinstance(t, TupleApp):
        out = all_names(t.fun)
        for a in t.args:
            out |= all_names(a)
        return out
    raise TypeError(f"not a lambda term: {t!r}")


class FreshNameSupply(FreshNames):
    """Fresh names that also avoid every name in the reserved terms."""

    def reserve(self, *terms: LamTerm) -> None:
        for t in terms:
            self.used |= all_names(t)


def substitute_many(sigma: dict, m: LamTerm, supply: FreshNameSupply | None = None) -> LamTerm:
    """Simultaneous capture-avoiding substitution of ``sigma[x]`` for each ``x``."""
    if supply is None:
        supply = FreshNameSupply()
    supply.reserve(m, *sigma.values())
    return _subst(sigma, m, supply)


def _subst(sigma, m, supply):
    if not sigma:
        return m
    if isinstance(m, Var):
        return sigma.get(m.name, m)
    if isinstance(m, App):
        return App(_subst(sigma, m.fun, supply), _subst(sigma, m.arg, supply))
    if isinstance(m, TupleApp):
        return TupleApp(_subst(sigma, m.fun, supply),
                        tuple(_subst(sigma, a, supply) for a in m.args))
    if isinstance(m, (Abs, TupleAbs)):
        bound = (m.var,) if isinstance(m, Abs) else tuple(m.order)
        fv_body = free_vars(m.body)
        inner = {x: n for x, n in sigma.items() if x not in bound and x in fv_body}
        if not inner:
            return m
        incoming = set()
        for n in inner.values():
            incoming |= free_vars(n)
        renamed = []
        for y in bound:
            if y in incoming:
                z = supply.fresh(y, incoming | fv_body | set(bound))
                inner[y] = Var(z)
                renamed.append(z)
            else:
                renamed.append(y)
        body = _subst(inner, m.body, supply)
        if isinstance(m, Abs):
            return Abs(renamed[0], body)
        return TupleAbs(VarOrder(renamed), body)
    raise TypeError(f"not a lambda term: {m!r}")


def substitute(n: LamTerm, x: str, m: LamTerm, supply: FreshNameSupply | None = None) -> LamTerm:
    """``[N/x]M``."""
    return substitute_many({x: n}, m, supply)


def _contract(t, supply):
    if isinstance(t, App) and isinstance(t.fun, Abs):
        return substitute(t.arg, t.fun.var, t.fun.body, supply)
    if isinstance(t, TupleApp) and isinstance(t.fun, TupleAbs):
        order = t.fun.order
        if len(order) != len(t.args):
            raise ArityMismatch(
                f"tuple abstraction over {len(order)} variables applied to {len(t.args)} arguments")
        return substitute_many(dict(zip(order, t.args)), t.fun.body, supply)
    return None


def beta_step(t: LamTerm, supply: FreshNameSupply | None = None) -> LamTerm | None:
    """Contract the leftmost-outermost redex, or return None in normal form."""
    if supply is None:
        supply = FreshNameSupply()
    reduced = _contract(t, supply)
    if reduced is not None:
        return reduced
    if isinstance(t, Var):
        return None
    if isinstance(t, App):
        f = beta_step(t.fun, supply)
        if f is not None:
            return App(f, t.arg)
        a = beta_step(t.arg, supply)
        return None if a is None else App(t.fun, a)
    if isinstance(t, Abs):
        b = beta_step(t.body, supply)
        return None if b is None else Abs(t.var, b)
    if isinstance(t, TupleAbs):
        b = beta_step(t.body, supply)
        return None if b is None else TupleAbs(t.order, b)
    if isinstance(t, TupleApp):
        f = beta_step(t.fun, supply)
        if f is not None:
            return TupleApp(f, t.args)
        for i, a in enumerate(t.args):
            r = beta_step(a, supply)
            if r is not None:
                return TupleApp(t.fun, t.args[:i] + (r,) + t.args[i + 1:])
        return None
    raise TypeError(f"not a lambda term: {t!r}")


@dataclass(frozen=True)
class NormalForm:
    term: LamTerm
    steps: int


@dataclass(frozen=True)
class StepLimit:
    """Verdict: no normal form reached within the step budget."""

    term: LamTerm
    steps: int


def normalize(t: LamTerm, max_steps: int = 10000) -> NormalForm | StepLimit:
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    supply = FreshNameSupply()
    for steps in range(max_steps + 1):
        nxt = beta_step(t, supply)
        if nxt is None:
            return NormalForm(t, steps)
        if steps == max_steps:
            break
        t = nxt
    return StepLimit(t, max_steps)


def curry(t: LamTerm) -> LamTerm:
    """Rewrite every tuple abstraction/application into nested single ones."""
    if isinstance(t, Var):
        return t
    if isinstance(t, App):
        return App(curry(t.fun), curry(t.arg))
    if isinstance(t, Abs):
        return Abs(t.var, curry(t.body))
    if isinstance(t, TupleAbs):
        body = curry(t.body)
        for x in reversed(t.order):
            body = Abs(x, body)
        return body
    if isinstance(t, TupleApp):
        out = curry(t.fun)
        for a in t.args:
            out = App(out, curry(a))
        return out
    raise TypeError(f"not a lambda term: {t!r}")


def uncurry(t: LamTerm, arity: int) -> TupleAbs:
    """Collapse ``arity`` leading single abstractions into one tuple abstraction."""
    names = []
    body = t
    for _ in range(arity):
        if not isinstance(body, Abs):
            raise NotCurriable(f"expected {arity} leading abstractions, found {len(names)}")
        if body.var in names:
            raise NotCurriable(f"variable {body.var!r} abstracted twice; no tuple form exists")
        names.append(body.var)
        body = body.body
    return TupleAbs(VarOrder(names), body)


def canonical(t: LamTerm, depth: int = 0, env: dict | None = None) -> LamTerm:
    """Rename bound variables to ``%0``, ``%1``, ... by binder depth."""
    env = env or {}
    if isinstance(t, Var):
        return Var(env.get(t.name, t.name))
    if isinstance(t, App):
        return App(canonical(t.fun, depth, env), canonical(t.arg, depth, env))
    if isinstance(t, Abs):
        name = f"%{depth}"
        return Abs(name, canonical(t.body, depth + 1, {**env, t.var: name}))
    if isinstance(t, TupleAbs):
        names = [f"%{depth + i}" for i in range(len(t.order))]
        inner = {**env, **dict(zip(t.order, names))}
        return TupleAbs(VarOrder(names), canonical(t.body, depth + len(names), inner))
    if isinstance(t, TupleApp):
        return TupleApp(canonical(t.fun, depth, env),
                        tuple(canonical(a, depth, env) for a in t.args))
    raise TypeError(f"not a lambda term: {t!r}")


def alpha_equivalent(a: LamTerm, b: LamTerm) -> bool:
    return canonical(a) == canonical(b)
