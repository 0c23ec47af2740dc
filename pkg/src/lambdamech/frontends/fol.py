"""Text syntax for first-order programs (``.fol`` files).

One statement per line (or ``;``-separated)::

    domain nat 21
    domain atoms a, b, c
    const c = 3
    pred edge/2 = {(0, 1), (1, 2)}
    fn f := \\(x, y, z). x + y * z
    even := \\(x). x = 0 | exists y. x = s(y) & odd(y)
    eval x + y * z with x=1, y=2, z=3
    check exists y. x = s(y) with x=2
    denote x < y
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..core import TOP, Atom as DAtom, Relation, VarOrder, format_value
from ..logic import (
    And,
    Atom,
    Const,
    Definition,
    Exists,
    FnApp,
    Forall,
    If,
    Interpretation,
    Not,
    Or,
    PredicateExtension,
    Var,
    arithmetic,
    atoms_interpretation,
    extend_with_function,
)
from ._lexer import ParseError, TokenStream, tokenize

SYMBOLS = (":=", "\\", "λ", "(", ")", ",", ".", ";", "=", "<", "+", "*", "×",
           "&", "∧", "|", "∨", "~", "¬", "{", "}", "/")
KEYWORDS = {"domain", "const", "pred", "fn", "eval", "check", "denote",
            "exists", "forall", "if", "with"}
INFIX_FNS = {"+": 1, "*": 2}
INFIX_PREDS = ("=", "<")


@dataclass(frozen=True)
class Query:
    kind: str  # "eval" (term), "check" (formula), "denote" (formula)
    expr: object
    assignment: tuple = ()  # (name, value) pairs in source order

    def alpha(self) -> dict:
        return dict(self.assignment)


@dataclass
class FolProgram:
    domain: tuple | None = None  # ("nat", bound) or ("atoms", names)
    consts: dict = field(default_factory=dict)
    preds: dict = field(default_factory=dict)
    functions: list = field(default_factory=list)  # (symbol, order, term)
    defs: list = field(default_factory=list)
    queries: list = field(default_factory=list)

    @property
    def extension(self) -> PredicateExtension:
        return PredicateExtension(tuple(self.defs))

    def interpretation(self, bound: int | None = None) -> Interpretation:
        """Base interpretation: builtins, constants, relations, then function extensions.

        ``bound`` overrides a ``domain nat`` declaration; with no domain
        declared at all it defaults to 8.
        """
        if self.domain is not None and self.domain[0] == "atoms":
            interp = atoms_interpretation(self.domain[1])
        else:
            b = bound if bound is not None else self.domain[1] if self.domain else 8
            interp = arithmetic(b)
        consts = {**interp.consts, **self.consts}
        preds = {**interp.preds, **self.preds}
        interp = Interpretation(interp.domain, interp.fns, preds, consts)
        for symbol, order, term in self.functions:
            interp = extend_with_function(interp, symbol, order, term)
        return interp


def parse_fol(text: str, file: str = "<input>") -> FolProgram:
    ts = TokenStream(tokenize(text, SYMBOLS, file, newlines=True))
    prog = FolProgram()
    p = _Parser(ts, prog)
    while True:
        while ts.peek().kind == "newline" or ts.at(";"):
            ts.next()
        if ts.peek().kind == "eof":
            return prog
        p.statement()
        if not (ts.accept(";") or ts.peek().kind in ("newline", "eof")):
            ts.fail("expected end of statement", ["';'", "newline"])


class _Parser:
    def __init__(self, ts: TokenStream, prog: FolProgram):
        self.ts = ts
        self.prog = prog

    @property
    def const_names(self) -> set:
        names = set(self.prog.consts)
        if self.prog.domain and self.prog.domain[0] == "atoms":
            names |= set(self.prog.domain[1])
        return names

    def statement(self):
        ts = self.ts
        tok = ts.peek()
        if ts.accept("domain"):
            kind = ts.expect_kind("ident", "'nat' or 'atoms'")
            if kind.text == "nat":
                bound = int(ts.expect_kind("number", "bound").text)
                if bound < 1:
                    raise ParseError(kind.span, "bound must be at least 1")
                self.prog.domain = ("nat", bound)
            elif kind.text == "atoms":
                names = [self.name("atom")]
                while ts.accept(","):
                    names.append(self.name("atom"))
                if len(set(names)) != len(names):
                    raise ParseError(kind.span, "atoms must be distinct")
                self.prog.domain = ("atoms", tuple(names))
            else:
                raise ParseError(kind.span, "domain kind must be 'nat' or 'atoms'", ["nat", "atoms"])
        elif ts.accept("const"):
            name = self.name("constant")
            ts.expect("=")
            self.prog.consts[name] = self.value()
        elif ts.accept("pred"):
            name = self.name("predicate")
            ts.expect("/")
            arity = int(ts.expect_kind("number", "arity").text)
            ts.expect("=")
            ts.expect("{")
            rows = []
            if not ts.at("}"):
                while True:
                    rows.append(self.row(arity))
                    if not ts.accept(","):
                        break
            ts.expect("}")
            self.prog.preds[name] = Relation.ordinal(arity, rows)
        elif ts.accept("fn"):
            name = self.name("function")
            ts.expect(":=")
            order = self.binder()
            self.prog.functions.append((name, order, self.term()))
        elif ts.accept("eval"):
            self.prog.queries.append(Query("eval", self.term(), self.assignment()))
        elif ts.accept("check"):
            self.prog.queries.append(Query("check", self.formula(), self.assignment()))
        elif ts.accept("denote"):
            self.prog.queries.append(Query("denote", self.formula()))
        elif tok.kind == "ident" and ts.at(":=", 1):
            name = ts.next().text
            ts.next()
            order = self.binder()
            body = self.formula()
            parts = body.parts if isinstance(body, Or) else (body,)
            self.prog.defs.append(Definition(name, order, parts))
        else:
            ts.fail("expected a statement",
                    ["domain", "const", "pred", "fn", "eval", "check", "denote", "definition"])

    def name(self, what: str) -> str:
        tok = self.ts.expect_kind("ident", what)
        if tok.text in KEYWORDS:
            raise ParseError(tok.span, f"{tok.text!r} is a keyword", [what])
        return tok.text

    def value(self):
        tok = self.ts.peek()
        if tok.kind == "number":
            return int(self.ts.next().text)
        if tok.kind == "ident":
            self.ts.next()
            return TOP if tok.text == "TOP" else DAtom(tok.text)
        self.ts.fail("expected a value", ["number", "atom", "TOP"])

    def row(self, arity: int) -> tuple:
        start = self.ts.expect("(")
        vals = []
        if not self.ts.at(")"):
            while True:
                vals.append(self.value())
                if not self.ts.accept(","):
                    break
        self.ts.expect(")")
        if len(vals) != arity:
            raise ParseError(start.span, f"row has {len(vals)} values, arity is {arity}")
        return tuple(vals)

    def binder(self) -> VarOrder:
        ts = self.ts
        if not (ts.accept("\\") or ts.accept("λ")):
            ts.fail("expected a lambda", ["'\\'"])
        ts.expect("(")
        names = []
        if not ts.at(")"):
            while True:
                tok = ts.peek()
                n = self.name("variable")
                if n in names:
                    raise ParseError(tok.span, f"variable {n!r} repeated in binder")
                names.append(n)
                if not ts.accept(","):
                    break
        ts.expect(")")
        ts.expect(".")
        return VarOrder(names)

    def assignment(self) -> tuple:
        if not self.ts.accept("with"):
            return ()
        pairs = []
        while True:
            n = self.name("variable")
            self.ts.expect("=")
            pairs.append((n, self.value()))
            if not self.ts.accept(","):
                return tuple(pairs)

    # formulas: quantifiers extend right; then if < | < & < ~ < atoms
    def formula(self):
        ts = self.ts
        if ts.at("exists") or ts.at("forall"):
            return self.quantified()
        left = self.disjunction()
        if ts.accept("if"):
            right = self.quantified() if ts.at("exists") or ts.at("forall") else self.disjunction()
            return If(left, right)
        return left

    def quantified(self):
        ts = self.ts
        kind = Exists if ts.next().text == "exists" else Forall
        names = [self.name("variable")]
        while ts.accept(","):
            names.append(self.name("variable"))
        ts.expect(".")
        body = self.formula()
        for n in reversed(names):
            body = kind(n, body)
        return body

    def disjunction(self):
        parts = [self.conjunction()]
        while self.ts.accept("|") or self.ts.accept("∨"):
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(parts)

    def conjunction(self):
        parts = [self.unary()]
        while self.ts.accept("&") or self.ts.accept("∧"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(parts)

    def unary(self):
        ts = self.ts
        if ts.accept("~") or ts.accept("¬"):
            return Not(self.unary())
        if ts.at("exists") or ts.at("forall"):
            return self.quantified()
        if ts.at("("):
            saved = ts.pos
            try:
                return self.atom()
            except ParseError:
                ts.pos = saved
            ts.expect("(")
            inner = self.formula()
            ts.expect(")")
            return inner
        return self.atom()

    def atom(self):
        ts = self.ts
        tok = ts.peek()
        left = self.term()
        for op in INFIX_PREDS:
            if ts.accept(op):
                return Atom(op, (left, self.term()))
        if isinstance(left, FnApp) and left.symbol not in INFIX_FNS:
            return Atom(left.symbol, left.args)
        if isinstance(left, Var):
            return Atom(left.name, ())
        raise ParseError(tok.span, "expected an atomic formula", ["'='", "'<'"])

    # terms
    def term(self):
        left = self.product()
        while self.ts.accept("+"):
            left = FnApp("+", (left, self.product()))
        return left

    def product(self):
        left = self.primary()
        while self.ts.accept("*") or self.ts.accept("×"):
            left = FnApp("*", (left, self.primary()))
        return left

    def primary(self):
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "number":
            return Const(ts.next().text)
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            ts.next()
            if ts.accept("("):
                args = []
                if not ts.at(")"):
                    while True:
                        args.append(self.term())
                        if not ts.accept(","):
                            break
                ts.expect(")")
                return FnApp(tok.text, tuple(args))
            return Const(tok.text) if tok.text in self.const_names else Var(tok.text)
        if ts.accept("("):
            inner = self.term()
            ts.expect(")")
            return inner
        ts.fail("expected a term", ["number", "identifier", "'('"])


# -- pretty printing ----------------------------------------------------------

def pretty_term(t) -> str:
    return _term(t, 0)


def _term(t, prec: int) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.symbol
    if isinstance(t, FnApp):
        if t.symbol in INFIX_FNS and len(t.args) == 2:
            p = INFIX_FNS[t.symbol]
            text = f"{_term(t.args[0], p)} {t.symbol} {_term(t.args[1], p + 1)}"
            return f"({text})" if p < prec else text
        return f"{t.symbol}({', '.join(_term(a, 0) for a in t.args)})"
    raise TypeError(f"not a term: {t!r}")


def pretty_formula(f) -> str:
    return _formula(f, 0, True)


# precedence: 0 quantifier/if, 1 or, 2 and, 3 not; ``last`` means nothing
# follows before the enclosing group closes, so a quantifier may extend right.
def _formula(f, prec: int, last: bool) -> str:
    if isinstance(f, Atom):
        if f.pred in INFIX_PREDS and len(f.args) == 2:
            return f"{pretty_term(f.args[0])} {f.pred} {pretty_term(f.args[1])}"
        if not f.args:
            return f.pred
        return f"{f.pred}({', '.join(pretty_term(a) for a in f.args)})"
    if isinstance(f, (Exists, Forall)):
        kw = "exists" if isinstance(f, Exists) else "forall"
        text = f"{kw} {f.var}. {_formula(f.body, 0, True)}"
        return text if last else f"({text})"
    if isinstance(f, Not):
        return f"~{_formula(f.body, 3, last)}"
    if isinstance(f, If):
        paren = prec > 0
        ante = _formula(f.antecedent, 1, True if paren else last)
        text = f"{_formula(f.consequent, 1, False)} if {ante}"
        return f"({text})" if paren else text
    if isinstance(f, (Or, And)):
        level, sym = (1, " | ") if isinstance(f, Or) else (2, " & ")
        paren = level < prec
        inner_last = True if paren else last
        n = len(f.parts)
        text = sym.join(_formula(part, level + 1, inner_last and i == n - 1)
                        for i, part in enumerate(f.parts))
        return f"({text})" if paren else text
    raise TypeError(f"not a formula: {f!r}")


def _value(v) -> str:
    return format_value(v)


def pretty_fol(prog: FolProgram) -> str:
    lines = []
    if prog.domain is not None:
        if prog.domain[0] == "nat":
            lines.append(f"domain nat {prog.domain[1]}")
        else:
            lines.append(f"domain atoms {', '.join(prog.domain[1])}")
    for name, v in prog.consts.items():
        lines.append(f"const {name} = {_value(v)}")
    for name, rel in prog.preds.items():
        rows = ", ".join("(" + ", ".join(_value(v) for v in r) + ")" for r in rel.sorted_rows())
        lines.append(f"pred {name}/{rel.arity} = {{{rows}}}")
    for name, order, term in prog.functions:
        lines.append(f"fn {name} := \\({', '.join(order)}). {pretty_term(term)}")
    for d in prog.defs:
        lines.append(f"{d.pred} := \\({', '.join(d.order)}). {pretty_definition_body(d)}")
    for q in prog.queries:
        expr = pretty_term(q.expr) if q.kind == "eval" else pretty_formula(q.expr)
        line = f"{q.kind} {expr}"
        if q.assignment:
            line += " with " + ", ".join(f"{n}={_value(v)}" for n, v in q.assignment)
        lines.append(line)
    return "\n".join(lines) + "\n"


def pretty_definition_body(d: Definition) -> str:
    n = len(d.disjuncts)
    if n == 1:
        f = d.disjuncts[0]
        return _formula(f, 2, True) if isinstance(f, Or) else pretty_formula(f)
    return " | ".join(_formula(f, 2, i == n - 1) for i, f in enumerate(d.disjuncts))
