"""Semantic checks for parsed HF-QASM programs."""

from __future__ import annotations

from dataclasses import dataclass

from .nodes import GATE_ALIASES, Call, Gate, ModuleDef, ProgramAst, QubitRef


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int = 0
    col: int = 0
    severity: str = "error"

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.line}:{self.col}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class Symbol:
    name: str
    is_array: bool
    size: int | None  # None for array params: the size comes from call sites
    is_param: bool


def module_symbols(mod: ModuleDef) -> dict[str, Symbol]:
    table: dict[str, Symbol] = {}
    for p in mod.params:
        table.setdefault(p.name, Symbol(p.name, p.is_array, None, True))
    for d in mod.locals:
        table.setdefault(d.name, Symbol(d.name, d.size is not None, d.size, False))
    return table


def call_edges(ast: ProgramAst) -> dict[str, list[str]]:
    """Direct callees of every module, deduplicated, in first-call order."""
    defined = ast.by_name()
    edges: dict[str, list[str]] = {}
    for name, mod in defined.items():
        seen: list[str] = []
        for call in mod.calls():
            if call.callee in defined and call.callee not in seen:
                seen.append(call.callee)
        edges[name] = seen
    return edges


def find_cycles(edges: dict[str, list[str]]) -> list[list[str]]:
    """Strongly connected components that contain a cycle (Tarjan)."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    cycles: list[list[str]] = []
    counter = 0

    def visit(v: str) -> None:
        nonlocal counter
        index[v] = low[v] = counter
        counter += 1
        stack.append(v)
        on_stack.add(v)
        for w in edges.get(v, []):
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp.append(w)
                if w == v:
                    break
            if len(comp) > 1 or v in edges.get(v, []):
                cycles.append(comp)

    for v in edges:
        if v not in index:
            visit(v)
    return cycles


def infer_array_sizes(ast: ProgramAst) -> dict[tuple[str, str], tuple[int, int]]:
    """(module, array param) -> (min, max) array length over all call sites.

    Sizes flow from arrays declared in callers down the call graph. Params
    whose size cannot be determined (unreachable module, cyclic program,
    bad call shapes) are simply absent from the result.
    """
    defined = ast.by_name()
    edges = call_edges(ast)
    if find_cycles(edges):
        return {}
    order: list[str] = []
    done: set[str] = set()

    def post(v: str) -> None:
        done.add(v)
        for w in edges.get(v, []):
            if w not in done:
                post(w)
        order.append(v)

    if "main" not in defined:
        return {}
    post("main")
    sizes: dict[tuple[str, str], tuple[int, int]] = {}
    for name in reversed(order):  # callers before callees
        mod = defined[name]
        syms = module_symbols(mod)
        for call in mod.calls():
            callee = defined.get(call.callee)
            if callee is None or len(callee.params) != len(call.args):
                continue
            for param, arg in zip(callee.params, call.args):
                if not param.is_array or arg.index is not None:
                    continue
                sym = syms.get(arg.name)
                if sym is None or not sym.is_array:
                    continue
                if sym.is_param:
                    known = sizes.get((name, sym.name))
                    if known is None:
                        continue
                    lo, hi = known
                else:
                    lo = hi = sym.size
                key = (callee.name, param.name)
                if key in sizes:
                    lo, hi = min(lo, sizes[key][0]), max(hi, sizes[key][1])
                sizes[key] = (lo, hi)
    return sizes


class _ModuleChecker:
    def __init__(self, mod: ModuleDef, defined: dict[str, ModuleDef], sizes, out: list[Diagnostic]):
        self.mod = mod
        self.defined = defined
        self.sizes = sizes
        self.out = out
        self.syms = module_symbols(mod)

    def report(self, code: str, message: str, node) -> None:
        self.out.append(Diagnostic(code, message, node.line, node.col))

    def check_names(self) -> None:
        seen: set[str] = set()
        for item in (*self.mod.params, *self.mod.locals):
            if item.name in seen:
                self.report("DuplicateName", f"duplicate qubit name {item.name!r} in module {self.mod.name}", item)
            seen.add(item.name)

    def bound(self, sym: Symbol) -> int | None:
        if sym.size is not None:
            return sym.size
        known = self.sizes.get((self.mod.name, sym.name))
        return known[0] if known else None

    def resolve(self, ref: QubitRef) -> Symbol | None:
        sym = self.syms.get(ref.name)
        if sym is None:
            self.report("UnresolvedQubit", f"unknown qubit {ref.name!r} in module {self.mod.name}", ref)
            return None
        if ref.index is not None:
            if not sym.is_array:
                self.report("IndexOnScalar", f"qubit {ref.name!r} is not an array", ref)
                return None
            limit = self.bound(sym)
            if limit is not None and ref.index >= limit:
                self.report(
                    "IndexOutOfBounds",
                    f"index {ref.index} out of bounds for {ref.name!r} of size {limit}",
                    ref,
                )
        return sym

    def footprint(self, ref: QubitRef, sym: Symbol) -> set[tuple[str, int | None]]:
        if ref.index is not None:
            return {(ref.name, ref.index)}
        if sym.is_array:
            limit = self.bound(sym)
            if limit is None:
                return {(ref.name, None)}
            return {(ref.name, i) for i in range(limit)}
        return {(ref.name, None)}

    def check_aliasing(self, stmt, refs: list[tuple[QubitRef, Symbol]]) -> None:
        seen: dict[str, set] = {}
        for ref, sym in refs:
            fp = self.footprint(ref, sym)
            prior = seen.setdefault(ref.name, set())
            whole = (ref.name, None) in fp or (ref.name, None) in prior
            if prior and (whole or fp & prior):
                what = "CNOT" if isinstance(stmt, Gate) else f"call to {stmt.callee}"
                self.report("DuplicateOperand", f"{what} uses qubit {ref} more than once", ref)
                return
            prior |= fp

    def check_gate(self, gate: Gate) -> None:
        refs = []
        for ref in gate.args:
            sym = self.resolve(ref)
            if sym is None:
                continue
            if sym.is_array and ref.index is None:
                self.report("ShapeMismatch", f"gate {gate.kind} needs a single qubit, {ref.name!r} is an array", ref)
                continue
            refs.append((ref, sym))
        if len(gate.args) == 2 and len(refs) == 2:
            self.check_aliasing(gate, refs)

    def check_call(self, call: Call) -> None:
        callee = self.defined.get(call.callee)
        syms = [self.resolve(ref) for ref in call.args]
        if callee is None:
            self.report("UnknownCallee", f"call to undefined module {call.callee!r}", call)
            return
        if len(callee.params) != len(call.args):
            self.report(
                "ArityMismatch",
                f"{call.callee} expects {len(callee.params)} arguments, got {len(call.args)}",
                call,
            )
            return
        refs = []
        for param, ref, sym in zip(callee.params, call.args, syms):
            if sym is None:
                continue
            if param.is_array:
                if ref.index is not None or not sym.is_array:
                    self.report(
                        "ShapeMismatch",
                        f"parameter {param.name!r} of {callee.name} is an array; pass a whole array, not {ref}",
                        ref,
                    )
                    continue
            elif sym.is_array and ref.index is None:
                self.report(
                    "ShapeMismatch",
                    f"parameter {param.name!r} of {callee.name} is a single qubit; {ref.name!r} is an array",
                    ref,
                )
                continue
            refs.append((ref, sym))
        self.check_aliasing(call, refs)

    def run(self) -> None:
        self.check_names()
        for stmt in self.mod.body:
            if isinstance(stmt, Gate):
                self.check_gate(stmt)
            else:
                self.check_call(stmt)


def validate(ast: ProgramAst) -> list[Diagnostic]:
    """Return every semantic violation in ``ast``; an empty list means valid."""
    out: list[Diagnostic] = []
    defined = ast.by_name()
    seen: set[str] = set()
    for mod in ast.modules:
        if mod.name in seen:
            out.append(Diagnostic("DuplicateModule", f"module {mod.name!r} defined more than once", mod.line, mod.col))
        seen.add(mod.name)
        if mod.name in GATE_ALIASES:
            out.append(Diagnostic("ReservedName", f"module name {mod.name!r} is a gate name", mod.line, mod.col))

    edges = call_edges(ast)
    for comp in find_cycles(edges):
        members = [m.name for m in ast.modules if m.name in comp]
        head = defined[members[0]]
        out.append(
            Diagnostic(
                "CircularCall",
                "circular module call among " + ", ".join(members),
                head.line,
                head.col,
            )
        )

    sizes = infer_array_sizes(ast)
    for mod in ast.modules:
        _ModuleChecker(mod, defined, sizes, out).run()
    return out
