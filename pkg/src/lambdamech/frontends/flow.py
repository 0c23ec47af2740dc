"""Text syntax for flowcharts with procedures (``.flow`` files).

A file is the main procedure; nested procedures are declared as
``name = \\(formals). { ... }``::

    nat X, Y, Z;
    gcd2 = \\(x, y, z). { ... }
    start L0; halt L2;
    box L0: X := 100 -> L1;
    box L1: gcd2(X, Y, Z) -> L2;
    test L3: x == y ? L4 : L5;
"""
from __future__ import annotations

from ..core import VarOrder
from ..flowchart import (
    Assign,
    BAnd,
    BinOp,
    BNot,
    Box,
    Call,
    Cmp,
    Flowchart,
    Ident,
    Num,
    ProcDecl,
    Procedure,
    Test,
)
from ._lexer import ParseError, TokenStream, tokenize

SYMBOLS = (":=", "->", "==", "&&", "\\", "λ", "(", ")", ",", ".", ";", ":",
           "=", "<", "+", "-", "!", "?", "{", "}")
KEYWORDS = {"nat", "start", "halt", "box", "test"}


def parse_flow(text: str, file: str = "<input>") -> Procedure:
    ts = TokenStream(tokenize(text, SYMBOLS, file))
    proc = _procedure(ts, (), closing=None)
    return proc


def _name(ts, what: str) -> str:
    tok = ts.expect_kind("ident", what)
    if tok.text in KEYWORDS:
        raise ParseError(tok.span, f"{tok.text!r} is a keyword", [what])
    return tok.text


def _label(ts) -> str:
    tok = ts.peek()
    if tok.kind in ("ident", "number") and tok.text not in KEYWORDS:
        return ts.next().text
    ts.fail("expected a node label", ["label"])


def _procedure(ts, formals, closing) -> Procedure:
    decls, procs, boxes, tests = [], [], [], []
    start = halt = None
    while True:
        tok = ts.peek()
        if closing is not None and ts.at(closing):
            end = tok
            break
        if closing is None and tok.kind == "eof":
            end = tok
            break
        if ts.accept("nat"):
            while True:
                decls.append(_name(ts, "identifier"))
                if not ts.accept(","):
                    break
            ts.expect(";")
        elif ts.accept("start"):
            if start is not None:
                raise ParseError(tok.span, "start declared twice")
            start = _label(ts)
            ts.expect(";")
        elif ts.accept("halt"):
            if halt is not None:
                raise ParseError(tok.span, "halt declared twice")
            halt = _label(ts)
            ts.expect(";")
        elif ts.accept("box"):
            entry = _label(ts)
            ts.expect(":")
            stmt = _statement(ts)
            ts.expect("->")
            boxes.append(Box(entry, stmt, _label(ts)))
            ts.expect(";")
        elif ts.accept("test"):
            entry = _label(ts)
            ts.expect(":")
            cond = _bool(ts)
            ts.expect("?")
            pos = _label(ts)
            ts.expect(":")
            tests.append(Test(entry, cond, pos, _label(ts)))
            ts.expect(";")
        elif tok.kind == "ident" and ts.at("=", 1):
            name = _name(ts, "procedure name")
            ts.expect("=")
            if not (ts.accept("\\") or ts.accept("λ")):
                ts.fail("expected a lambda", ["'\\'"])
            ts.expect("(")
            names = []
            if not ts.at(")"):
                while True:
                    ntok = ts.peek()
                    n = _name(ts, "formal parameter")
                    if n in names:
                        raise ParseError(ntok.span, f"formal {n!r} repeated")
                    names.append(n)
                    if not ts.accept(","):
                        break
            ts.expect(")")
            ts.expect(".")
            ts.expect("{")
            inner = _procedure(ts, VarOrder(names), closing="}")
            ts.expect("}")
            ts.accept(";")
            procs.append(ProcDecl(name, inner))
        else:
            ts.fail("expected a declaration, box or test",
                    ["nat", "start", "halt", "box", "test", "procedure"])
    if start is None:
        raise ParseError(end.span, "missing 'start' declaration", ["start"])
    if halt is None:
        raise ParseError(end.span, "missing 'halt' declaration", ["halt"])
    body = Flowchart(tuple(decls), tuple(boxes), tuple(tests), start, halt)
    return Procedure(body, tuple(procs), formals)


def _statement(ts):
    name = _name(ts, "identifier")
    if ts.accept(":="):
        return Assign(name, _expr(ts))
    ts.expect("(")
    args = []
    if not ts.at(")"):
        while True:
            args.append(_expr(ts))
            if not ts.accept(","):
                break
    ts.expect(")")
    return Call(name, tuple(args))


def _expr(ts):
    left = _operand(ts)
    while ts.at("+") or ts.at("-"):
        op = ts.next().text
        left = BinOp(op, left, _operand(ts))
    return left


def _operand(ts):
    tok = ts.peek()
    if tok.kind == "number":
        return Num(int(ts.next().text))
    if tok.kind == "ident" and tok.text not in KEYWORDS:
        return Ident(ts.next().text)
    if ts.accept("("):
        inner = _expr(ts)
        ts.expect(")")
        return inner
    ts.fail("expected an expression", ["number", "identifier", "'('"])


def _bool(ts):
    left = _bool_unary(ts)
    while ts.accept("&&"):
        left = BAnd(left, _bool_unary(ts))
    return left


def _bool_unary(ts):
    if ts.accept("!"):
        return BNot(_bool_unary(ts))
    if ts.at("("):
        saved = ts.pos
        try:
            return _comparison(ts)
        except ParseError:
            ts.pos = saved
        ts.expect("(")
        inner = _bool(ts)
        ts.expect(")")
        return inner
    return _comparison(ts)


def _comparison(ts):
    left = _expr(ts)
    if ts.at("==") or ts.at("<"):
        op = ts.next().text
        return Cmp(op, left, _expr(ts))
    ts.fail("expected a comparison", ["'=='", "'<'"])


# -- pretty printing ----------------------------------------------------------

def pretty_expr(e) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, BinOp):
        right = pretty_expr(e.right)
        if isinstance(e.right, BinOp):
            right = f"({right})"
        return f"{pretty_expr(e.left)} {e.op} {right}"
    raise TypeError(f"not an expression: {e!r}")


def pretty_bool(b) -> str:
    if isinstance(b, Cmp):
        return f"{pretty_expr(b.left)} {b.op} {pretty_expr(b.right)}"
    if isinstance(b, BNot):
        return f"!({pretty_bool(b.body)})"
    if isinstance(b, BAnd):
        right = pretty_bool(b.right)
        if isinstance(b.right, BAnd):
            right = f"({right})"
        return f"{pretty_bool(b.left)} && {right}"
    raise TypeError(f"not a boolean expression: {b!r}")


def pretty_stmt(s) -> str:
    if isinstance(s, Assign):
        return f"{s.lhs} := {pretty_expr(s.rhs)}"
    return f"{s.proc}({', '.join(pretty_expr(a) for a in s.actuals)})"


def pretty_flow(proc: Procedure, indent: int = 0) -> str:
    pad = "    " * indent
    lines = []
    body = proc.body
    if body.decls:
        lines.append(f"{pad}nat {', '.join(body.decls)};")
    for d in proc.procs:
        lines.append(f"{pad}{d.name} = \\({', '.join(d.proc.formals)}). {{")
        lines.append(pretty_flow(d.proc, indent + 1).rstrip("\n"))
        lines.append(f"{pad}}}")
    lines.append(f"{pad}start {body.start};")
    lines.append(f"{pad}halt {body.halt};")
    for b in body.boxes:
        lines.append(f"{pad}box {b.entry}: {pretty_stmt(b.stmt)} -> {b.exit};")
    for t in body.tests:
        lines.append(f"{pad}test {t.entry}: {pretty_bool(t.cond)} ? {t.pos} : {t.neg};")
    return "\n".join(lines) + "\n"
