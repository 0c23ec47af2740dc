"""Command-line driver.

    lambdamech lam normalize FILE [--max-steps N]
    lambdamech fol eval FILE [--bound B]
    lambdamech fol minmodel FILE [--bound B] [--max-rounds N]
    lambdamech flow run FILE [--in X=100,Y=161] [--max-steps N] [--max-depth N]
    lambdamech flow compare FILE [--bound B]

``--json`` prints one record per result.  Exit status is 0 when every
verdict is a success, 1 when any is an error verdict, 2 on usage or parse
errors.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys

from . import __version__
from .core import TOP, LambdaMechError, Relation, VarTuple, format_value, is_nat
from .flowchart import (
    DepthLimit,
    FlowchartError,
    Halted,
    Timeout,
    declarative_relation,
    operational_relation,
    run_program,
    validate_procedure,
)
from .frontends import ParseError, parse_flow, parse_fol, parse_lambda_file, pretty_lambda
from .lam import NormalForm, normalize
from .logic import DfpContext, denotation, eval_formula, eval_term, minimal_model_rounds

DEFAULT_MAX_STEPS = 10000
DEFAULT_MAX_DEPTH = 256
DEFAULT_MAX_ROUNDS = 10000
DEFAULT_BOUND = 8

SUCCESS = {"NormalForm", "Value", "Model", "Halted", "Agree"}


def _json_value(v):
    if isinstance(v, VarTuple):
        return {k: _json_value(v[k]) for k in sorted(v)}
    if isinstance(v, tuple):
        return [_json_value(x) for x in v]
    if v is TOP or not is_nat(v) and not isinstance(v, bool):
        return format_value(v)
    return v


def _rows(rel: Relation) -> list:
    return [_json_value(r) for r in rel.sorted_rows()]


def _text(v) -> str:
    if isinstance(v, VarTuple):
        return "{" + ", ".join(f"{k}={_text(v[k])}" for k in sorted(v)) + "}"
    if isinstance(v, tuple):
        return "(" + ", ".join(_text(x) for x in v) + ")"
    if isinstance(v, bool):
        return "true" if v else "false"
    return format_value(v)


def _count(n: int, noun: str) -> str:
    return f"{n} {noun}" if n == 1 else f"{n} {noun}s"


class _Reporter:
    def __init__(self, command: str, file: str, as_json: bool, out):
        self.command = command
        self.file = file
        self.as_json = as_json
        self.out = out
        self.failed = False

    def emit(self, verdict: str, payload, text: str, steps=None, **extra):
        if verdict not in SUCCESS:
            self.failed = True
        if self.as_json:
            rec = {"command": self.command, "file": self.file, "verdict": verdict,
                   "payload": payload, "steps": steps, **extra}
            print(json.dumps(rec, sort_keys=True), file=self.out)
        else:
            print(f"{verdict}: {text}" if text else verdict, file=self.out)


def _parse_inputs(text: str | None) -> dict:
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        name, sep, value = item.partition("=")
        if not sep or not name.strip() or not value.strip().isdigit():
            raise argparse.ArgumentTypeError(f"bad --in entry {item!r}; use NAME=NUMBER")
        out[name.strip()] = int(value)
    return out


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def cmd_lam_normalize(args, rep: _Reporter):
    for term in parse_lambda_file(_read(args.file), args.file):
        result = normalize(term, args.max_steps)
        verdict = "NormalForm" if isinstance(result, NormalForm) else "StepLimit"
        text = pretty_lambda(result.term)
        rep.emit(verdict, text, f"{text}  [{_count(result.steps, 'step')}]", result.steps)


def cmd_fol_eval(args, rep: _Reporter):
    prog = parse_fol(_read(args.file), args.file)
    interp = prog.interpretation(args.bound)
    if prog.defs:
        model, _ = minimal_model_rounds(DfpContext.of(interp, prog.extension), prog.extension,
                                        args.max_rounds)
        interp = interp.with_preds(model)
    for q in prog.queries:
        alpha = VarTuple(q.alpha())
        if q.kind == "eval":
            v = eval_term(interp, alpha, q.expr)
            rep.emit("Value", _json_value(v), _text(v), query="eval")
        elif q.kind == "check":
            v = eval_formula(interp, alpha, q.expr)
            rep.emit("Value", v, _text(v), query="check")
        else:
            rel = denotation(interp, q.expr)
            rows = rel.sorted_rows()
            rep.emit("Value", _rows(rel), f"{len(rows)} rows: " + " ".join(_text(r) for r in rows),
                     query="denote")


def _split_sink(rel: Relation):
    plain = [r for r in rel.sorted_rows() if TOP not in r]
    sink = [r for r in rel.sorted_rows() if TOP in r]
    return plain, sink


def cmd_fol_minmodel(args, rep: _Reporter):
    prog = parse_fol(_read(args.file), args.file)
    interp = prog.interpretation(args.bound)
    ext = prog.extension
    model, rounds = minimal_model_rounds(DfpContext.of(interp, ext), ext, args.max_rounds)
    payload, lines = {}, []
    for d in ext.defs:
        plain, sink = _split_sink(model[d.pred])
        payload[d.pred] = {"rows": [_json_value(r) for r in plain],
                           "sink_rows": [_json_value(r) for r in sink]}
        text = f"{d.pred} = {{{' '.join(_text(r) for r in plain)}}}"
        if sink:
            text += f" + sink {{{' '.join(_text(r) for r in sink)}}}"
        lines.append(text)
    summary = "; ".join(lines) + f"  [{_count(rounds, 'round')}]"
    rep.emit("Model", payload, summary, None, rounds=rounds)


def cmd_flow_run(args, rep: _Reporter):
    main = parse_flow(_read(args.file), args.file)
    result = run_program(main, args.inputs, args.max_steps, args.max_depth)
    if isinstance(result, Halted):
        rep.emit("Halted", _json_value(result.data), _text(result.data), result.steps)
    elif isinstance(result, Timeout):
        rep.emit("Timeout", None, f"no halt within {result.steps} steps", result.steps)
    elif isinstance(result, DepthLimit):
        rep.emit("DepthLimit", {"depth": result.depth},
                 f"call depth exceeded {result.depth}", result.steps)


def cmd_flow_compare(args, rep: _Reporter):
    main = parse_flow(_read(args.file), args.file)
    validate_procedure(main)
    if main.procs or main.body.has_calls():
        raise FlowchartError("compare needs a procedure-free flowchart")
    ops = operational_relation(main.body, args.bound)
    dec = declarative_relation(main.body, args.bound)
    if ops == dec:
        rep.emit("Agree", {"pairs": len(ops)}, f"{len(ops)} pairs in both relations")
        return
    only_op = Relation.ordinal(2, ops.rows - dec.rows).sorted_rows()
    only_dec = Relation.ordinal(2, dec.rows - ops.rows).sorted_rows()
    side, witness = ("operational", only_op[0]) if only_op else ("declarative", only_dec[0])
    rep.emit("Disagree", {"witness": _json_value(witness), "only_in": side},
             f"{_text(witness)} only in the {side} relation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lambdamech", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="one JSON record per result")
    sub = parser.add_subparsers(dest="calculus", required=True)

    lam = sub.add_parser("lam", help="lambda terms").add_subparsers(dest="action", required=True)
    p = lam.add_parser("normalize", parents=[common], help="normal-order reduction")
    p.add_argument("file")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.set_defaults(func=cmd_lam_normalize)

    fol = sub.add_parser("fol", help="first-order programs").add_subparsers(dest="action", required=True)
    p = fol.add_parser("eval", parents=[common], help="answer eval/check/denote queries")
    p.add_argument("file")
    p.add_argument("--bound", type=int, default=None)
    p.add_argument("--max-rounds", type=int, default=DEFAULT_MAX_ROUNDS)
    p.set_defaults(func=cmd_fol_eval)
    p = fol.add_parser("minmodel", parents=[common], help="least model of the predicate extension")
    p.add_argument("file")
    p.add_argument("--bound", type=int, default=None)
    p.add_argument("--max-rounds", type=int, default=DEFAULT_MAX_ROUNDS)
    p.set_defaults(func=cmd_fol_minmodel)

    flow = sub.add_parser("flow", help="flowcharts").add_subparsers(dest="action", required=True)
    p = flow.add_parser("run", parents=[common], help="execute the main procedure")
    p.add_argument("file")
    p.add_argument("--in", dest="inputs", type=_parse_inputs, default={},
                   help="initial values, e.g. X=100,Y=161")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    p.set_defaults(func=cmd_flow_run)
    p = flow.add_parser("compare", parents=[common],
                        help="compare operational and declarative relations")
    p.add_argument("file")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.set_defaults(func=cmd_flow_compare)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if getattr(args, "bound", None) is not None and args.bound < 1:
        print("lambdamech: --bound must be at least 1", file=err)
        return 2
    rep = _Reporter(f"{args.calculus} {args.action}", args.file, args.json, out)
    try:
        args.func(args, rep)
    except ParseError as exc:
        print(f"lambdamech: parse error: {exc}", file=err)
        return 2
    except OSError as exc:
        print(f"lambdamech: {exc}", file=err)
        return 2
    except LambdaMechError as exc:
        rep.emit("Error", {"error": type(exc).__name__, "message": str(exc)},
                 f"{type(exc).__name__}: {exc}")
    return 1 if rep.failed else 0


if __name__ == "__main__":
    sys.exit(main())
