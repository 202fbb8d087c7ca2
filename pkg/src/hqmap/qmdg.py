"""Module call DAG and per-module quantum module dependency graphs."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Mapping

from .hfqasm import Call, Gate, ModuleDef, ProgramAst, QubitRef, call_edges, module_symbols
from .requp import QecProfile
from .tables import GateLatencyTable, MissingProfile

Qubit = tuple[str, "int | None"]

OP = "op"
CALL = "call"


def qubit_label(q: Qubit) -> str:
    name, index = q
    return name if index is None else f"{name}[{index}]"


@dataclass(frozen=True)
class ModuleCallDag:
    edges: Mapping[str, tuple[str, ...]]
    post_order: tuple[str, ...]
    unreachable: tuple[str, ...] = ()

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.post_order


def build_call_dag(ast: ProgramAst) -> ModuleCallDag:
    """Post-order (children first, in first-call order; main last) of the
    modules reachable from main. Assumes the program validated cleanly."""
    edges = call_edges(ast)
    order: list[str] = []
    seen: set[str] = set()

    def visit(name: str) -> None:
        seen.add(name)
        for callee in edges[name]:
            if callee not in seen:
                visit(callee)
        order.append(name)

    visit("main")
    unreachable = tuple(m.name for m in ast.modules if m.name not in seen)
    return ModuleCallDag({n: tuple(edges[n]) for n in order}, tuple(order), unreachable)


@dataclass(frozen=True)
class QmdgNode:
    id: int
    kind: str  # OP or CALL
    name: str  # gate kind or callee module
    operands: tuple[Qubit, ...]
    ancilla: int = 0
    duration: Fraction = Fraction(0)
    args: tuple[QubitRef, ...] = field(default=(), compare=False, repr=False)

    @property
    def is_call(self) -> bool:
        return self.kind == CALL


@dataclass(frozen=True)
class QmdgEdge:
    src: int
    dst: int
    shared: tuple[Qubit, ...]

    @property
    def weight(self) -> int:
        return len(self.shared)


@dataclass(frozen=True)
class Qmdg:
    module_name: str
    nodes: tuple[QmdgNode, ...]
    edges: tuple[QmdgEdge, ...]
    levels: Mapping[int, int]

    @cached_property
    def _index(self) -> dict[int, QmdgNode]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def _succ(self) -> dict[int, list[QmdgEdge]]:
        out: dict[int, list[QmdgEdge]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            out[e.src].append(e)
        return out

    @cached_property
    def _pred(self) -> dict[int, list[QmdgEdge]]:
        out: dict[int, list[QmdgEdge]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            out[e.dst].append(e)
        return out

    def node(self, node_id: int) -> QmdgNode:
        return self._index[node_id]

    def out_edges(self, node_id: int) -> list[QmdgEdge]:
        return self._succ[node_id]

    def in_edges(self, node_id: int) -> list[QmdgEdge]:
        return self._pred[node_id]

    @property
    def node_ids(self) -> list[int]:
        return [n.id for n in self.nodes]

    def level_sets(self) -> dict[int, list[int]]:
        sets: dict[int, list[int]] = defaultdict(list)
        for nid in self.node_ids:
            sets[self.levels[nid]].append(nid)
        return dict(sorted(sets.items()))

    def with_durations(self, durations: Mapping[int, Fraction]) -> "Qmdg":
        nodes = tuple(
            QmdgNode(n.id, n.kind, n.name, n.operands, n.ancilla, durations.get(n.id, n.duration), n.args)
            for n in self.nodes
        )
        return Qmdg(self.module_name, nodes, self.edges, self.levels)


def expand_ref(
    ref: QubitRef,
    module: ModuleDef,
    array_sizes: Mapping[tuple[str, str], "tuple[int, int]"] | None = None,
    explicit: Mapping[str, set[int]] | None = None,
) -> list[Qubit]:
    """Qubits touched by ``ref``; whole arrays expand element-wise.

    An array parameter whose length is unknown expands to the indices the
    module names explicitly plus a ``(name, None)`` stand-in for the rest.
    """
    if ref.index is not None:
        return [(ref.name, ref.index)]
    sym = module_symbols(module).get(ref.name)
    if sym is None or not sym.is_array:
        return [(ref.name, None)]
    size = sym.size
    if size is None and array_sizes is not None:
        known = array_sizes.get((module.name, ref.name))
        size = known[1] if known else None
    if size is not None:
        return [(ref.name, i) for i in range(size)]
    named = sorted((explicit or {}).get(ref.name, ()))
    return [(ref.name, i) for i in named] + [(ref.name, None)]


def _explicit_indices(module: ModuleDef) -> dict[str, set[int]]:
    found: dict[str, set[int]] = defaultdict(set)
    for stmt in module.body:
        for ref in stmt.args:
            if ref.index is not None:
                found[ref.name].add(ref.index)
    return found


def build_qmdg(
    module: ModuleDef,
    qec: QecProfile,
    lat: GateLatencyTable,
    callee_durations: Mapping[str, Fraction] | None = None,
    array_sizes: Mapping[tuple[str, str], "tuple[int, int]"] | None = None,
) -> Qmdg:
    """Dependency graph of one module body.

    Node ids follow statement order starting at 1. An edge i -> j exists when
    j is the first statement after i touching one of i's qubits; the edge
    records every qubit for which that holds. Calls to modules missing from
    ``callee_durations`` get duration 0.
    """
    explicit = _explicit_indices(module)
    nodes: list[QmdgNode] = []
    last_user: dict[Qubit, int] = {}
    shared: dict[tuple[int, int], list[Qubit]] = {}
    for nid, stmt in enumerate(module.body, 1):
        operands: list[Qubit] = []
        for ref in stmt.args:
            for q in expand_ref(ref, module, array_sizes, explicit):
                if q not in operands:
                    operands.append(q)
        if isinstance(stmt, Gate):
            ancilla = qec.ancilla(stmt.kind)
            if ancilla is None:
                raise MissingProfile(stmt.kind, f"{qec.name} ancilla")
            if stmt.kind not in lat:
                raise MissingProfile(stmt.kind, "latency")
            node = QmdgNode(nid, OP, stmt.kind, tuple(operands), ancilla, lat[stmt.kind], stmt.args)
        else:
            assert isinstance(stmt, Call)
            duration = (callee_durations or {}).get(stmt.callee, Fraction(0))
            node = QmdgNode(nid, CALL, stmt.callee, tuple(operands), 0, duration, stmt.args)
        nodes.append(node)
        for q in operands:
            prev = last_user.get(q)
            if prev is not None:
                shared.setdefault((prev, nid), []).append(q)
            last_user[q] = nid
    edges = tuple(QmdgEdge(s, d, tuple(qs)) for (s, d), qs in sorted(shared.items()))
    g = Qmdg(module.name, tuple(nodes), edges, {})
    return Qmdg(module.name, g.nodes, g.edges, levelize(g))


def levelize(g: Qmdg) -> dict[int, int]:
    """ASAP levels: 1 for sources, otherwise one more than the deepest predecessor.

    Node ids are in statement order and every edge points forward, so one
    pass in id order suffices.
    """
    levels: dict[int, int] = {}
    for nid in sorted(g.node_ids):
        levels[nid] = 1 + max((levels[e.src] for e in g.in_edges(nid)), default=0)
    return levels


EdgeDelay = Callable[[QmdgEdge], Fraction]


def critical_path(g: Qmdg, delay: EdgeDelay | None = None) -> Fraction:
    """Longest source-to-sink path: node durations plus edge delays."""
    finish: dict[int, Fraction] = {}
    for nid in sorted(g.node_ids):
        start = Fraction(0)
        for e in g.in_edges(nid):
            start = max(start, finish[e.src] + (delay(e) if delay else 0))
        finish[nid] = start + g.node(nid).duration
    return max(finish.values(), default=Fraction(0))


def serial_length(g: Qmdg, delay: EdgeDelay | None = None) -> Fraction:
    """Sum of all durations and edge delays: the length of a fully serial run."""
    total = sum((n.duration for n in g.nodes), Fraction(0))
    if delay is not None:
        total += sum((delay(e) for e in g.edges), Fraction(0))
    return total


def dump_qmdg(g: Qmdg) -> str:
    lines = [f"# qmdg {g.module_name}"]
    for n in g.nodes:
        lines.append(f"node {n.id} {n.kind}:{n.name} level={g.levels[n.id]}")
    for e in g.edges:
        lines.append(f"edge {e.src} {e.dst} {','.join(qubit_label(q) for q in e.shared)}")
    return "\n".join(lines) + "\n"
