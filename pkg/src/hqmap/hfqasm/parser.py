"""Recursive-descent parser for HF-QASM.

Accepted grammar (aliases ``qbit``/``qubit``, ``Tdag``/``T†``, ``Sdag``/``S†``)::

    start      -> module* main
    main       -> 'module' 'main' ( '(' ')' )? '{' body '}'
    module     -> 'module' name '(' param (',' param)* ')' '{' body '}'
    param      -> qubit '*'? name
    body       -> (def ';')* (stmt ';')+
    def        -> qubit ('[' num ']')? name | qubit name '[' num ']'
    stmt       -> gate '(' arg (',' arg)* ')' | name '(' arg (',' arg)* ')'
    arg        -> name ('[' num ']')?
"""

from __future__ import annotations

from .lexer import Token, tokenize
from .nodes import (
    GATE_ALIASES,
    TWO_QUBIT_GATES,
    Call,
    Gate,
    ModuleDef,
    Param,
    ProgramAst,
    QubitDecl,
    QubitRef,
    Stmt,
)

_DESCRIBE = {"MODULE": "'module'", "QUBIT": "'qubit'", "NAME": "name", "NUM": "number", "EOF": "end of input"}


def _describe(kind: str) -> str:
    return _DESCRIBE.get(kind, f"'{kind}'")


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, expected: frozenset[str] = frozenset()):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.expected = expected


class _Parser:
    def __init__(self, tokens: list[Token]):
        if tokens:
            last = tokens[-1]
            eof = Token("EOF", "", last.line, last.col + len(last.value))
        else:
            eof = Token("EOF", "", 1, 1)
        self.toks = tokens + [eof]
        self.pos = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.pos]

    def fail(self, *expected: str, message: str | None = None) -> ParseError:
        tok = self.cur
        got = _describe(tok.kind) if tok.kind == "EOF" else repr(tok.value)
        if message is None:
            message = f"expected {' or '.join(_describe(e) for e in expected)}, got {got}"
        return ParseError(message, tok.line, tok.col, frozenset(expected))

    def expect(self, kind: str) -> Token:
        tok = self.cur
        if tok.kind != kind:
            raise self.fail(kind)
        self.pos += 1
        return tok

    def accept(self, kind: str) -> Token | None:
        if self.cur.kind == kind:
            self.pos += 1
            return self.toks[self.pos - 1]
        return None

    # --- grammar rules ---

    def program(self) -> ProgramAst:
        modules: list[ModuleDef] = []
        while True:
            if self.cur.kind == "EOF":
                raise self.fail("MODULE", message="expected 'module main' before end of input")
            mod = self.module()
            modules.append(mod)
            if mod.is_main:
                break
        if self.cur.kind != "EOF":
            raise self.fail("EOF", message=f"expected end of input after module main, got {self.cur.value!r}")
        return ProgramAst(tuple(modules))

    def module(self) -> ModuleDef:
        start = self.expect("MODULE")
        name = self.expect("NAME")
        params: list[Param] = []
        if name.value == "main":
            if self.accept("("):
                if self.cur.kind != ")":
                    raise self.fail(")", message="module main takes no parameters")
                self.expect(")")
        else:
            self.expect("(")
            params.append(self.param())
            while self.accept(","):
                params.append(self.param())
            self.expect(")")
        self.expect("{")
        decls, body = self.body()
        self.expect("}")
        return ModuleDef(name.value, tuple(params), tuple(decls), tuple(body), start.line, start.col)

    def param(self) -> Param:
        kw = self.expect("QUBIT")
        is_array = self.accept("*") is not None
        name = self.expect("NAME")
        return Param(name.value, is_array, kw.line, kw.col)

    def body(self) -> tuple[list[QubitDecl], list[Stmt]]:
        decls: list[QubitDecl] = []
        while self.cur.kind == "QUBIT":
            decls.append(self.decl())
            self.expect(";")
        stmts: list[Stmt] = []
        while self.cur.kind != "}":
            if self.cur.kind == "QUBIT":
                raise self.fail(message="qubit declarations must precede all gates in a module body")
            if self.cur.kind != "NAME":
                raise self.fail("NAME", "}") if stmts else self.fail("QUBIT", "NAME")
            stmts.append(self.stmt())
            self.expect(";")
        if not stmts:
            raise self.fail("NAME", message="module body needs at least one gate or call")
        return decls, stmts

    def decl(self) -> QubitDecl:
        # both "qubit[3] a" (grammar) and "qubit a[3]" (listing style) are accepted
        kw = self.expect("QUBIT")
        size = self.size() if self.cur.kind == "[" else None
        name = self.expect("NAME")
        if size is None and self.cur.kind == "[":
            size = self.size()
        return QubitDecl(name.value, size, kw.line, kw.col)

    def size(self) -> int:
        self.expect("[")
        num = self.expect("NUM")
        if int(num.value) < 1:
            raise ParseError("array size must be positive", num.line, num.col, frozenset({"NUM"}))
        self.expect("]")
        return int(num.value)

    def stmt(self) -> Stmt:
        head = self.expect("NAME")
        self.expect("(")
        args = [self.arg()]
        while self.accept(","):
            args.append(self.arg())
        close = self.expect(")")
        kind = GATE_ALIASES.get(head.value)
        if kind is None:
            if "†" in head.value:
                raise ParseError(f"unknown gate {head.value!r}", head.line, head.col)
            return Call(head.value, tuple(args), head.line, head.col)
        want = 2 if kind in TWO_QUBIT_GATES else 1
        if len(args) != want:
            raise ParseError(
                f"gate {head.value} takes {want} argument{'s' if want > 1 else ''}, got {len(args)}",
                close.line,
                close.col,
                frozenset({")"} if len(args) > want else {","}),
            )
        return Gate(kind, tuple(args), head.line, head.col)

    def arg(self) -> QubitRef:
        name = self.expect("NAME")
        index = None
        if self.accept("["):
            index = int(self.expect("NUM").value)
            self.expect("]")
        return QubitRef(name.value, index, name.line, name.col)


def parse(text: str) -> ProgramAst:
    """Parse HF-QASM source into a :class:`ProgramAst`.

    Raises :class:`LexError` or :class:`ParseError`, both carrying the
    line and column of the offending token.
    """
    return _Parser(tokenize(text)).program()


def parse_file(path) -> ProgramAst:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
