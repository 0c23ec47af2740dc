"""Parsers and printers for the ``.lam``, ``.fol`` and ``.flow`` formats."""
from ._lexer import ParseError, SourceSpan
from .flow import parse_flow, pretty_flow
from .fol import FolProgram, Query, parse_fol, pretty_fol, pretty_formula, pretty_term
from .lam import parse_lambda, parse_lambda_file, pretty_lambda

__all__ = [
    "FolProgram",
    "ParseError",
    "Query",
    "SourceSpan",
    "parse_flow",
    "parse_fol",
    "parse_lambda",
    "parse_lambda_file",
    "pretty_flow",
    "pretty_fol",
    "pretty_formula",
    "pretty_lambda",
    "pretty_term",
]
