"""Reference implementations used to check the library.

None of these share code with ``lambdamech``: lambda terms are
normalized by evaluation into Python closures (no substitution at all),
flowcharts are traced with cycle detection instead of a step budget, and
arithmetic facts come straight from Python integers.
"""
from itertools import chain, combinations, product

from lambdamech.lam import Abs, App, TupleAbs, TupleApp, Var


# -- arithmetic ---------------------------------------------------------------

def euclid(a, b):
    while b:
        a, b = b, a % b
    return a


def subtraction_gcd(x, y, limit=10_000):
    """Subtraction GCD on plain ints; None when it never halts."""
    for _ in range(limit):
        if x == y:
            return x
        if x < y:
            if x == 0:
                return None
            y -= x
        else:
            if y == 0:
                return None
            x -= y
    return None


def evens(bound):
    return {n for n in range(bound) if n % 2 == 0}


def odds(bound):
    return {n for n in range(bound) if n % 2 == 1}


# -- lambda terms: normalization by evaluation --------------------------------

class OutOfFuel(Exception):
    pass


class OracleArity(Exception):
    pass


class _Thunk:
    __slots__ = ("fn", "value", "done")

    def __init__(self, fn):
        self.fn, self.value, self.done = fn, None, False

    def force(self):
        if not self.done:
            self.value, self.done = self.fn(), True
            self.fn = None
        return self.value


class _Lam:
    def __init__(self, fn):
        self.fn = fn


class _TLam:
    def __init__(self, arity, fn):
        self.arity, self.fn = arity, fn


class _Neutral:
    """A stuck head (free name or non-reducible value) and its spine."""

    def __init__(self, head, spine=()):
        self.head, self.spine = head, tuple(spine)


class NbE:
    def __init__(self, fuel=1000):
        self.fuel = fuel

    def _tick(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise OutOfFuel

    def eval(self, t, env):
        if isinstance(t, Var):
            return env[t.name].force() if t.name in env else _Neutral(t.name)
        if isinstance(t, Abs):
            return _Lam(lambda th: self.eval(t.body, {**env, t.var: th}))
        if isinstance(t, TupleAbs):
            return _TLam(len(t.order),
                         lambda ths: self.eval(t.body, {**env, **dict(zip(t.order, ths))}))
        if isinstance(t, App):
            f = self.eval(t.fun, env)
            return self.apply(f, _Thunk(lambda: self.eval(t.arg, env)))
        if isinstance(t, TupleApp):
            f = self.eval(t.fun, env)
            ths = tuple(_Thunk(lambda a=a: self.eval(a, env)) for a in t.args)
            return self.tapply(f, ths)
        raise TypeError(t)

    def apply(self, f, th):
        self._tick()
        if isinstance(f, _Lam):
            return f.fn(th)
        if isinstance(f, _Neutral):
            return _Neutral(f.head, f.spine + (("app", th),))
        return _Neutral(f, (("app", th),))  # a tuple abstraction applied singly

    def tapply(self, f, ths):
        self._tick()
        if isinstance(f, _TLam):
            if f.arity != len(ths):
                raise OracleArity
            return f.fn(ths)
        if isinstance(f, _Neutral):
            return _Neutral(f.head, f.spine + (("tuple", ths),))
        return _Neutral(f, (("tuple", ths),))

    def quote(self, v, depth=0):
        """Read back in the canonical ``%k`` naming used by ``lam.canonical``."""
        self._tick()
        if isinstance(v, _Lam):
            name = f"%{depth}"
            done = _Thunk(lambda: _Neutral(name))
            return Abs(name, self.quote(v.fn(done), depth + 1))
        if isinstance(v, _TLam):
            names = [f"%{depth + i}" for i in range(v.arity)]
            ths = tuple(_Thunk(lambda n=n: _Neutral(n)) for n in names)
            return TupleAbs(tuple(names), self.quote(v.fn(ths), depth + v.arity))
        if isinstance(v, _Neutral):
            out = Var(v.head) if isinstance(v.head, str) else self.quote(v.head, depth)
            for kind, arg in v.spine:
                if kind == "app":
                    out = App(out, self.quote(arg.force(), depth))
                else:
                    out = TupleApp(out, tuple(self.quote(a.force(), depth) for a in arg))
            return out
        raise TypeError(v)


def nbe_normal_form(t, fuel=1000):
    """Canonically named normal form, or raises OutOfFuel / OracleArity."""
    m = NbE(fuel)
    try:
        return m.quote(m.eval(t, {}))
    except RecursionError:
        raise OutOfFuel from None


# -- flowcharts ---------------------------------------------------------------

def _num(e, data):
    kind = type(e).__name__
    if kind == "Num":
        return e.value
    if kind == "Ident":
        return data[e.name]
    a, b = _num(e.left, data), _num(e.right, data)
    return a + b if e.op == "+" else (a - b if a > b else 0)


def _cond(c, data):
    kind = type(c).__name__
    if kind == "Cmp":
        a, b = _num(c.left, data), _num(c.right, data)
        return a == b if c.op == "==" else a < b
    if kind == "BNot":
        return not _cond(c.body, data)
    return _cond(c.left, data) and _cond(c.right, data)


def trace_relation(fc, bound):
    """Input/output pairs over ``{0..bound-1}``, tracing each start state.

    Divergence is detected by revisiting a state; leaving the bounded
    range drops the pair.
    """
    names = sorted(fc.decls)
    boxes = {b.entry: b for b in fc.boxes}
    tests = {t.entry: t for t in fc.tests}
    pairs = set()
    for values in product(range(bound), repeat=len(names)):
        data = dict(zip(names, values))
        node, seen = fc.start, set()
        while True:
            key = (node, tuple(sorted(data.items())))
            if key in seen or any(v >= bound for v in data.values()):
                break
            seen.add(key)
            if node == fc.halt:
                pairs.add((tuple(zip(names, values)), tuple(sorted(data.items()))))
                break
            if node in tests:
                t = tests[node]
                node = t.pos if _cond(t.cond, data) else t.neg
            else:
                b = boxes[node]
                data[b.stmt.lhs] = _num(b.stmt.rhs, data)
                node = b.exit
    return pairs


def as_plain_pairs(rel):
    return {(tuple(sorted(a.items())), tuple(sorted(b.items()))) for a, b in rel.rows}


# -- predicate extensions -------------------------------------------------------

def subsets(items):
    items = list(items)
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


# -- first-order formulas -------------------------------------------------------

def tarski(f, env, carrier, fns, preds, consts):
    """Truth of ``f`` by direct recursion; ``fns`` take positional arguments."""
    kind = type(f).__name__

    def term(t):
        k = type(t).__name__
        if k == "Var":
            return env[t.name]
        if k == "Const":
            return consts[t.symbol]
        return fns[t.symbol](*[term(a) for a in t.args])

    if kind == "Atom":
        return tuple(term(a) for a in f.args) in preds[f.pred]
    if kind == "And":
        return all(tarski(p, env, carrier, fns, preds, consts) for p in f.parts)
    if kind == "Or":
        return any(tarski(p, env, carrier, fns, preds, consts) for p in f.parts)
    if kind == "Not":
        return not tarski(f.body, env, carrier, fns, preds, consts)
    if kind == "If":
        return (tarski(f.consequent, env, carrier, fns, preds, consts)
                or not tarski(f.antecedent, env, carrier, fns, preds, consts))
    results = (tarski(f.body, {**env, f.var: d}, carrier, fns, preds, consts) for d in carrier)
    return any(results) if kind == "Exists" else all(results)


def saturating_arithmetic(bound):
    """Python-level s, +, * over {0..bound-1} with None standing for TOP."""
    def sat(v):
        return v if v is not None and v < bound else None

    def lift(op):
        return lambda a, b: None if a is None or b is None else sat(op(a, b))

    carrier = list(range(bound)) + [None]
    fns = {"s": lambda a: None if a is None else sat(a + 1),
           "+": lift(lambda a, b: a + b), "*": lift(lambda a, b: a * b)}
    preds = {"=": {(d, d) for d in carrier},
             "<": {(a, b) for a in range(bound) for b in range(bound) if a < b}}
    return carrier, fns, preds
