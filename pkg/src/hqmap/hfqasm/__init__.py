from .lexer import LexError, Token, tokenize
from .nodes import (
    GATE_KINDS,
    Call,
    Gate,
    ModuleDef,
    Param,
    ProgramAst,
    QubitDecl,
    QubitRef,
)
from .parser import ParseError, parse, parse_file
from .printer import format_module, format_program
from .validate import Diagnostic, call_edges, infer_array_sizes, module_symbols, validate

__all__ = [
    "GATE_KINDS",
    "Call",
    "Diagnostic",
    "Gate",
    "LexError",
    "ModuleDef",
    "Param",
    "ParseError",
    "ProgramAst",
    "QubitDecl",
    "QubitRef",
    "Token",
    "call_edges",
    "format_module",
    "format_program",
    "infer_array_sizes",
    "module_symbols",
    "parse",
    "parse_file",
    "tokenize",
    "validate",
]
