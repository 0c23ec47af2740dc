import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import formulas, random_base, random_candidate, random_extension
from lambdamech.core import TOP, NameMismatch, Relation, VarOrder, VarTuple, all_var_tuples
from lambdamech.frontends import parse_fol
from lambdamech.logic import (
    TRUE,
    And,
    ArityMismatch,
    Atom,
    Const,
    Definition,
    DefinedSymbolInterpreted,
    DfpContext,
    DuplicateDefinedPredicate,
    Exists,
    FnApp,
    Forall,
    FreeVarEnumerationMismatch,
    If,
    IllegalBodyConnective,
    Not,
    Or,
    PredicateExtension,
    RecursiveDefinition,
    RoundLimit,
    UnboundVariable,
    UnknownSymbol,
    Var,
    arithmetic,
    corresponding_formula,
    denotation,
    eval_formula,
    eval_term,
    extend_with_function,
    holds,
    is_model,
    kleene_chain,
    minimal_model,
    minimal_model_rounds,
    validate_extension,
)
from oracles import evens, odds, saturating_arithmetic, subsets, tarski

x, y, z = Var("x"), Var("y"), Var("z")
ZERO = Const("0")


def plus(a, b):
    return FnApp("+", (a, b))


def times(a, b):
    return FnApp("*", (a, b))


def s(a):
    return FnApp("s", (a,))


def eq(a, b):
    return Atom("=", (a, b))


XYZ = plus(x, times(y, z))

EVEN_ODD = """
domain nat 21
even := \\(x). x = 0 | exists y. x = s(y) & odd(y)
odd := \\(x). x = s(0) | exists y. x = s(y) & even(y)
"""


def even_odd(bound=None):
    prog = parse_fol(EVEN_ODD)
    interp = prog.interpretation(bound)
    return DfpContext.of(interp, prog.extension), prog.extension


def nats(rel):
    return {r[0] for r in rel.rows if r[0] is not TOP}


# -- evaluation -----------------------------------------------------------------

def test_eval_term_examples():
    interp = arithmetic(21)
    assert eval_term(interp, VarTuple(x=1, y=2, z=3), XYZ) == 7
    assert eval_term(interp, VarTuple(), s(s(ZERO))) == 2
    assert eval_term(interp, VarTuple(x=20), s(x)) is TOP
    assert eval_term(interp, VarTuple(x=TOP), plus(x, ZERO)) is TOP


def test_constants():
    prog = parse_fol("domain nat 5\nconst c = 3")
    interp = prog.interpretation()
    assert eval_term(interp, {}, Const("c")) == 3
    assert eval_term(interp, {}, Const("9")) is TOP


def test_eval_errors():
    interp = arithmetic(4)
    with pytest.raises(UnboundVariable):
        eval_term(interp, {}, x)
    with pytest.raises(UnknownSymbol):
        eval_term(interp, {}, FnApp("f", (ZERO,)))
    with pytest.raises(ArityMismatch):
        eval_term(interp, {}, FnApp("s", (ZERO, ZERO)))
    with pytest.raises(UnknownSymbol):
        eval_formula(interp, {}, Atom("p", (ZERO,)))
    with pytest.raises(ArityMismatch):
        eval_formula(interp, {}, Atom("=", (ZERO,)))


def test_eval_formula_examples():
    interp = arithmetic(21)
    assert eval_formula(interp, VarTuple(x=0), eq(x, ZERO))
    odd = Relation.ordinal(1, [(1,)])
    f = Exists("y", And((eq(x, s(y)), Atom("odd", (y,)))))
    assert eval_formula(interp.with_preds({"odd": odd}), VarTuple(x=2), f)
    assert not eval_formula(interp.with_preds({"odd": odd}), VarTuple(x=3), f)
    assert not eval_formula(interp, VarTuple(x=0), Not(eq(x, ZERO)))
    assert eval_formula(interp, VarTuple(x=1), If(eq(x, x), eq(x, ZERO)))
    assert not eval_formula(interp, {}, Forall("x", Atom("<", (ZERO, s(x)))))


def test_denotation_examples():
    interp = arithmetic(3)
    rel = denotation(interp, Atom("<", (x, y)))
    expected = {VarTuple(x=0, y=1), VarTuple(x=0, y=2), VarTuple(x=1, y=2)}
    assert rel.rows == expected and rel.index == {"x", "y"}
    closed = denotation(interp, eq(ZERO, ZERO))
    assert closed.rows == {VarTuple()}
    assert denotation(interp, Not(eq(ZERO, ZERO))).rows == frozenset()
    sink_only = denotation(arithmetic(4), eq(x, s(x)))
    assert sink_only.rows == {VarTuple(x=TOP)}


# -- function extension -----------------------------------------------------------

def test_extend_with_function_examples():
    base = arithmetic(21)
    i1 = extend_with_function(base, "f", VarOrder("xyz"), XYZ)
    i2 = extend_with_function(i1, "g", VarOrder("yzx"), XYZ)
    one, two, three = Const("1"), Const("2"), Const("3")
    assert eval_term(i2, {}, FnApp("f", (one, two, three))) == 7
    assert eval_term(i2, {}, FnApp("g", (one, two, three))) == 5
    assert "f" not in base.fns


def test_extend_with_function_errors():
    base = arithmetic(8)
    with pytest.raises(RecursiveDefinition):
        extend_with_function(base, "f", VarOrder("x"), FnApp("f", (x,)))
    with pytest.raises(RecursiveDefinition):
        extend_with_function(base, "s", VarOrder("x"), x)
    with pytest.raises(NameMismatch):
        extend_with_function(base, "f", VarOrder("xy"), s(x))


def test_function_extension_permutes_arguments():
    base = arithmetic(6)
    i = extend_with_function(base, "f", VarOrder("xyz"), XYZ)
    i = extend_with_function(i, "g", VarOrder("yzx"), XYZ)
    for a, b, c in product(range(6), repeat=3):
        f = i.fns["f"][1]((a, b, c))
        assert i.fns["g"][1]((b, c, a)) == f
        expected = a + b * c
        assert f == (expected if expected < 6 else TOP)


# -- predicate extensions -----------------------------------------------------------

def test_validate_even_odd():
    ctx, ext = even_odd()
    validate_extension(ctx, ext)


def test_validate_errors():
    base = arithmetic(4)
    d = Definition("even", ("x",), (eq(x, ZERO),))
    dup = PredicateExtension((d, d))
    with pytest.raises(DuplicateDefinedPredicate):
        validate_extension(DfpContext.of(base, dup), dup)
    bad = PredicateExtension((Definition("even", ("x", "z"), (eq(x, ZERO),)),))
    with pytest.raises(FreeVarEnumerationMismatch):
        validate_extension(DfpContext.of(base, bad), bad)
    neg = parse_fol("even := \\(x). ~odd(x)\nodd := \\(x). x = 1").extension
    with pytest.raises(IllegalBodyConnective):
        validate_extension(DfpContext.of(base, neg), neg)
    unknown = PredicateExtension((Definition("p", ("x",), (Atom("q", (x,)),)),))
    with pytest.raises(UnknownSymbol):
        validate_extension(DfpContext.of(base, unknown), unknown)
    clash = PredicateExtension((Definition("<", ("x", "y"), (eq(x, y),)),))
    with pytest.raises(DefinedSymbolInterpreted):
        validate_extension(DfpContext.of(base, clash), clash)


def test_is_model_examples():
    ctx, ext = even_odd()
    model = minimal_model(ctx, ext)
    assert is_model(ctx, model, ext)
    empty = {"even": Relation.ordinal(1), "odd": Relation.ordinal(1)}
    assert not is_model(ctx, empty, ext)
    full = {p: Relation.full(1, ctx.base.domain) for p in ("even", "odd")}
    assert is_model(ctx, full, ext)
    with pytest.raises(ArityMismatch):
        is_model(ctx, {"even": Relation.ordinal(2), "odd": Relation.ordinal(1)}, ext)


def test_even_odd_minimal_model():
    ctx, ext = even_odd()
    model = minimal_model(ctx, ext)
    assert nats(model["even"]) == evens(21)
    assert nats(model["odd"]) == odds(21)
    # the sink is its own successor, so it lands in both relations
    assert (TOP,) in model["even"].rows and (TOP,) in model["odd"].rows


def test_minimal_model_small_cases():
    base = arithmetic(4)
    empty = PredicateExtension(())
    assert minimal_model_rounds(DfpContext.of(base, empty), empty) == ({}, 0)
    selfish = PredicateExtension((Definition("p", ("x",), (Atom("p", (x,)),)),))
    assert minimal_model(DfpContext.of(base, selfish), selfish)["p"].rows == frozenset()


def test_round_limit():
    ctx, ext = even_odd()
    with pytest.raises(RoundLimit):
        minimal_model(ctx, ext, max_rounds=3)


def test_corresponding_formula_examples():
    ctx, ext = even_odd()
    f = corresponding_formula(ext)
    assert isinstance(f, And) and len(f.parts) == 2
    assert all(isinstance(h, Forall) and isinstance(h.body, If) for h in f.parts)
    assert corresponding_formula(PredicateExtension(())) == TRUE
    single = PredicateExtension((Definition("p", ("x",), (Atom("q", (x,)),)),))
    assert corresponding_formula(single) == And((
        Forall("x", If(Atom("p", (x,)), Or((Atom("q", (x,)),)))),))


# -- properties -------------------------------------------------------------------

def test_model_lemma_randomized():
    rng = random.Random(1234)
    checked = 0
    for _ in range(600):
        base = random_base(rng, rng.randint(1, 4))
        ext = random_extension(rng)
        ctx = DfpContext.of(base, ext)
        validate_extension(ctx, ext)
        cand = random_candidate(rng, ext, base.domain)
        lemma = holds(base.with_preds(cand), corresponding_formula(ext))
        assert lemma == is_model(ctx, cand, ext)
        checked += 1
    assert checked >= 500


def test_minimality_exhaustive():
    rng = random.Random(99)
    for _ in range(150):
        base = random_base(rng, rng.randint(1, 3))
        ext = random_extension(rng, max_defs=1, max_arity=1)
        ctx = DfpContext.of(base, ext)
        least = minimal_model(ctx, ext)
        assert is_model(ctx, least, ext)
        (p,) = ext.defined
        for rows in subsets(base.domain):
            cand = {p: Relation.ordinal(1, [(d,) for d in rows])}
            if is_model(ctx, cand, ext):
                assert least[p] <= cand[p]


def test_kleene_chain_is_monotone():
    rng = random.Random(7)
    chains = [even_odd()]
    for _ in range(200):
        base = random_base(rng, rng.randint(1, 4))
        ext = random_extension(rng)
        chains.append((DfpContext.of(base, ext), ext))
    for ctx, ext in chains:
        prev = None
        for cand in kleene_chain(ctx, ext):
            if prev is not None:
                assert all(prev[p] <= cand[p] for p in cand)
                assert prev != cand
            prev = cand
        assert is_model(ctx, prev, ext)


@settings(max_examples=250)
@given(formulas(), st.integers(1, 3))
def test_denotation_eval_coherence(f, bound):
    interp = arithmetic(bound)
    carrier, fns, preds = saturating_arithmetic(bound)
    consts = {n: (int(n) if int(n) < bound else None) for n in ("0", "1", "2", "5")}
    rel = denotation(interp, f)
    names = sorted(rel.index)
    for alpha in all_var_tuples(names, interp.domain):
        inside = alpha in rel.rows
        assert inside == eval_formula(interp, alpha, f)
        env = {k: (None if v is TOP else v) for k, v in alpha.items()}
        assert inside == tarski(f, env, carrier, fns, preds, consts)
