"""Text syntax for lambda terms.

    \\x. M          single abstraction (also ``λx. M``)
    \\(x, y). M     tuple abstraction
    M N            application, left associative
    M (N1, N2)     tuple application; ``M (N,)`` for one argument
"""
from __future__ import annotations

from ..core import RepeatedVariable, VarOrder
from ..lam import Abs, App, LamTerm, TupleAbs, TupleApp, Var
from ._lexer import ParseError, TokenStream, tokenize

SYMBOLS = ("\\", "λ", "(", ")", ",", ".", ";")


def parse_lambda(text: str, file: str = "<input>") -> LamTerm:
    """Parse exactly one term."""
    terms = parse_lambda_file(text, file)
    if len(terms) != 1:
        ts = TokenStream(tokenize(text, SYMBOLS, file))
        ts.fail(f"expected one term, got {len(terms)}")
    return terms[0]


def parse_lambda_file(text: str, file: str = "<input>") -> list[LamTerm]:
    """Parse ``;``-separated terms."""
    ts = TokenStream(tokenize(text, SYMBOLS, file))
    terms = []
    while ts.peek().kind != "eof":
        terms.append(_term(ts))
        if not ts.accept(";") and ts.peek().kind != "eof":
            ts.fail("expected ';' or end of input", ["';'"])
    if not terms:
        ts.fail("expected a term", ["term"])
    return terms


def _starts_lambda(ts) -> bool:
    return ts.at("\\") or ts.at("λ")


def _term(ts) -> LamTerm:
    if _starts_lambda(ts):
        return _abstraction(ts)
    head = _atom(ts)
    while True:
        tok = ts.peek()
        if tok.kind == "ident":
            head = App(head, Var(ts.next().text))
        elif ts.at("("):
            head = _paren_args(ts, head)
        elif _starts_lambda(ts):
            return App(head, _abstraction(ts))
        else:
            return head


def _abstraction(ts) -> LamTerm:
    ts.next()
    if ts.accept("("):
        names, spans = [], []
        if not ts.at(")"):
            while True:
                tok = ts.expect_kind("ident", "variable")
                names.append(tok.text)
                spans.append(tok.span)
                if not ts.accept(","):
                    break
        ts.expect(")")
        ts.expect(".")
        try:
            order = VarOrder(names)
        except RepeatedVariable:
            dup = next(i for i, n in enumerate(names) if n in names[:i])
            raise ParseError(spans[dup], f"variable {names[dup]!r} repeated in tuple abstraction") from None
        return TupleAbs(order, _term(ts))
    var = ts.expect_kind("ident", "variable").text
    ts.expect(".")
    return Abs(var, _term(ts))


def _atom(ts) -> LamTerm:
    tok = ts.peek()
    if tok.kind == "ident":
        return Var(ts.next().text)
    if ts.accept("("):
        inner = _term(ts)
        ts.expect(")")
        return inner
    ts.fail("expected a term", ["variable", "'('", "'\\'"])


def _paren_args(ts, head) -> LamTerm:
    ts.expect("(")
    if ts.accept(")"):
        return TupleApp(head, ())
    first = _term(ts)
    if ts.accept(")"):
        return App(head, first)
    args = [first]
    while ts.accept(","):
        if ts.at(")"):
            break
        args.append(_term(ts))
    ts.expect(")")
    return TupleApp(head, tuple(args))


def pretty_lambda(t: LamTerm) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Abs):
        return f"\\{t.var}. {pretty_lambda(t.body)}"
    if isinstance(t, TupleAbs):
        return f"\\({', '.join(t.order)}). {pretty_lambda(t.body)}"
    if isinstance(t, App):
        return f"{_fun(t.fun)} {_arg(t.arg)}"
    if isinstance(t, TupleApp):
        inner = ", ".join(pretty_lambda(a) for a in t.args)
        if len(t.args) == 1:
            inner += ","
        return f"{_fun(t.fun)} ({inner})"
    raise TypeError(f"not a lambda term: {t!r}")


def _fun(t) -> str:
    if isinstance(t, (Abs, TupleAbs)):
        return f"({pretty_lambda(t)})"
    return pretty_lambda(t)


def _arg(t) -> str:
    if isinstance(t, Var):
        return t.name
    return f"({pretty_lambda(t)})"
