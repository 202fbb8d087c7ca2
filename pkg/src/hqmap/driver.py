"""Module-by-module mapping of a whole program and assembly of the result."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .binder import Binding, bind, traffic_matrix
from .hfqasm import Param, ProgramAst, infer_array_sizes
from .partition import PartitionResult, WeightAssignment, assign_weights, partition
from .qmdg import Qmdg, QmdgEdge, Qubit, build_call_dag, build_qmdg, qubit_label
from .requp import (
    ArchGeometry,
    ArchParams,
    ModuleResourceProfile,
    QecProfile,
    ReconfigPolicy,
    RoutingMatrix,
    characterize,
    check_budget,
    reconfig_delay,
    routing_matrix,
    total_ancilla,
)
from .scheduler import GLOBAL, EdgeDelays, Schedule, schedule
from .tables import MOVE, GateLatencyTable, GateTemplateTable, placeholder_templates


@dataclass(frozen=True)
class MapOptions:
    tolerance: float = 1.5
    timeout: float | None = 60.0
    seed: int = 0
    reconfig: ReconfigPolicy = reconfig_delay


@dataclass
class MappingResult:
    module: str
    qmdg: Qmdg
    weights: WeightAssignment
    partition: PartitionResult
    profile: ModuleResourceProfile
    geometry: ArchGeometry
    routing: RoutingMatrix
    traffic: list[list[int]]
    binding: Binding
    schedule: Schedule
    edge_delay: EdgeDelays
    params: tuple[Param, ...] = ()
    callees: dict[str, "MappingResult"] = field(default_factory=dict)

    @property
    def makespan(self) -> Fraction:
        return self.schedule.makespan


@dataclass
class ProgramMapping:
    main: MappingResult
    modules: dict[str, MappingResult]  # in post order
    params: ArchParams
    qec: QecProfile
    unreachable: tuple[str, ...]
    memo_hits: int
    memo_misses: int
    runtime_s: float

    @property
    def latency(self) -> Fraction:
        return self.main.makespan

    @property
    def total_ancilla(self) -> int:
        return total_ancilla([r.profile for r in self.modules.values()], self.params, self.qec)


class _Memo:
    """Mapped modules by name; a lookup after the first counts as a hit."""

    def __init__(self):
        self.results: dict[str, MappingResult] = {}
        self.looked_up: set[str] = set()
        self.hits = 0
        self.misses = 0

    def store(self, result: MappingResult) -> None:
        self.results[result.module] = result

    def lookup(self, name: str) -> MappingResult:
        if name in self.looked_up:
            self.hits += 1
        else:
            self.looked_up.add(name)
            self.misses += 1
        return self.results[name]


def _declared_width(mod) -> int:
    return sum(d.width for d in mod.locals)


def _resource_profile(
    g: Qmdg, mod, part: PartitionResult, k: int, total_data: int, max_ancilla: int
) -> ModuleResourceProfile:
    local_names = {d.name for d in mod.locals}
    ancilla = 0 if mod.is_main else _declared_width(mod)
    used = {q for n in g.nodes for q in n.operands}
    if mod.is_main:
        data = len({q for q in used if q[0] in local_names})
    else:
        data = len({q for q in used if q[0] not in local_names})
    per_part: list[set[Qubit]] = [set() for _ in range(k)]
    for n in g.nodes:
        per_part[part.assignment[n.id]].update(n.operands)
    widest = max((len(s) for s in per_part), default=0)
    l_max = max(widest, math.ceil((data + ancilla) / k))
    return ModuleResourceProfile(mod.name, data, ancilla, l_max, total_data, max_ancilla)


def map_program(
    ast: ProgramAst,
    params: ArchParams,
    qec: QecProfile,
    latencies: GateLatencyTable,
    options: MapOptions | None = None,
) -> ProgramMapping:
    """Map every module reachable from main, callees first, reusing each
    module's mapping wherever it is called. ``ast`` must validate cleanly."""
    opts = options or MapOptions()
    check_budget(params, qec)
    started = time.perf_counter()
    dag = build_call_dag(ast)
    modules = ast.by_name()
    sizes = infer_array_sizes(ast)
    total_data = _declared_width(ast.main)
    ancilla_of = {name: (0 if name == "main" else _declared_width(modules[name])) for name in dag.post_order}
    max_ancilla = max(ancilla_of.values(), default=0)
    memo = _Memo()

    for name in dag.post_order:
        mod = modules[name]
        callees = {c.callee: memo.lookup(c.callee) for c in mod.calls()}
        durations = {c: r.makespan for c, r in callees.items()}
        g = build_qmdg(mod, qec, latencies, durations, sizes)
        weights = assign_weights(g, params.k)
        part = partition(g, weights, params.k, opts.tolerance, opts.seed)
        profile = _resource_profile(g, mod, part, params.k, total_data, max_ancilla)
        geom = characterize(profile, params, qec)
        routing = routing_matrix(geom, params)
        traffic = traffic_matrix(g, part.assignment, params.k)
        binding = bind(traffic, routing, opts.timeout)
        reconfig = _boundary_delay(g, name, geom, callees, ancilla_of, params, opts.reconfig)
        sched = schedule(g, part.assignment, binding.assignment, routing, reconfig, params.core_capacity)
        delays = EdgeDelays(g, part.assignment, binding.assignment, routing, reconfig)
        memo.store(
            MappingResult(
                name, g, weights, part, profile, geom, routing, traffic, binding, sched, delays, mod.params, callees
            )
        )

    runtime = time.perf_counter() - started
    results = {n: memo.results[n] for n in dag.post_order}
    return ProgramMapping(
        results["main"], results, params, qec, dag.unreachable, memo.hits, memo.misses, runtime
    )


def _boundary_delay(
    g: Qmdg,
    module: str,
    geom: ArchGeometry,
    callees: Mapping[str, MappingResult],
    ancilla_of: Mapping[str, int],
    params: ArchParams,
    policy: ReconfigPolicy,
) -> Callable[[QmdgEdge], Fraction]:
    def context(nid: int) -> tuple[str, ArchGeometry]:
        node = g.node(nid)
        if node.is_call:
            return node.name, callees[node.name].geometry
        return module, geom

    def delay(e: QmdgEdge) -> Fraction:
        (cx, gx), (cy, gy) = context(e.src), context(e.dst)
        extra = 0 if cx == cy else max(0, ancilla_of[cy] - ancilla_of[cx])
        return policy(gx, gy, extra, params)

    return delay


# --- final assembly --------------------------------------------------------


@dataclass(frozen=True)
class FinalRecord:
    start: Fraction
    duration: Fraction
    core: int
    kind: str  # gate kind or "move"
    operands: tuple[str, ...]
    mcl: str

    @property
    def end(self) -> Fraction:
        return self.start + self.duration


@dataclass(frozen=True)
class FinalProgram:
    records: tuple[FinalRecord, ...]
    total_latency: Fraction

    def recomputed_makespan(self) -> Fraction:
        return max((r.end for r in self.records), default=Fraction(0))

    @property
    def operation_count(self) -> int:
        return sum(1 for r in self.records if r.kind != MOVE)


def _callee_namer(node, params, parent: Callable[[Qubit], str], path: str) -> Callable[[Qubit], str]:
    """Names for a callee's qubits: parameters resolve to the caller's
    argument qubits, locals get the call path as a suffix."""
    bound = {p.name: (p, a) for p, a in zip(params, node.args)}

    def rename(q: Qubit) -> str:
        entry = bound.get(q[0])
        if entry is None:
            return f"{qubit_label(q)}@{path}"
        p, arg = entry
        return parent((arg.name, q[1]) if p.is_array else (arg.name, arg.index))

    return rename


def expand_final(mapping: ProgramMapping | MappingResult, templates: GateTemplateTable | None = None) -> FinalProgram:
    """Inline every module call into one time-sorted list of placed
    operations and qubit moves, each carrying its MCL body."""
    root = mapping.main if isinstance(mapping, ProgramMapping) else mapping
    tmpl = templates or placeholder_templates()
    records: list[FinalRecord] = []

    def walk(result: MappingResult, offset: Fraction, rename: Callable[[Qubit], str], path: str) -> None:
        g = result.qmdg
        entries = result.schedule.entries
        for nid, entry in entries.items():
            node = g.node(nid)
            start = offset + entry.start
            if node.is_call:
                callee = result.callees[node.name]
                sub = f"{path}.{nid}" if path else str(nid)
                walk(callee, start, _callee_namer(node, callee.params, rename, sub), sub)
            else:
                operands = tuple(rename(q) for q in node.operands)
                records.append(FinalRecord(start, entry.duration, entry.core, node.name, operands, tmpl.body(node.name)))
        for e in g.edges:
            gap = result.edge_delay(e)
            if gap <= 0:
                continue
            core = result.edge_delay.core(e.dst)
            if g.node(e.src).is_call:
                core = GLOBAL
            moved = tuple(rename(q) for q in e.shared)
            records.append(FinalRecord(offset + entries[e.src].end, gap, core, MOVE, moved, tmpl.body(MOVE)))

    walk(root, Fraction(0), qubit_label, "")
    records.sort(key=lambda r: (r.start, r.core, r.kind, r.operands, r.duration))
    return FinalProgram(tuple(records), root.makespan)


def _num(x: Fraction) -> float | int:
    return x.numerator if x.denominator == 1 else float(x)


def report(mapping: ProgramMapping, include_runtime: bool = False) -> dict:
    """Summary of a mapping as plain JSON-ready data. Wall-clock runtime is
    left out unless asked for, so reports of identical runs are identical."""
    modules = {}
    for name, r in mapping.modules.items():
        modules[name] = {
            "makespan_us": _num(r.makespan),
            "makespan_exact": str(r.makespan),
            "nodes": len(r.qmdg.nodes),
            "edges": len(r.qmdg.edges),
            "levels": max(r.qmdg.levels.values(), default=0),
            "edge_cut": r.partition.edge_cut,
            "part_loads": [list(row) for row in r.partition.loads],
            "binding": list(r.binding.assignment),
            "binding_objective_us": _num(r.binding.objective),
            "binding_proven_optimal": r.binding.proven_optimal,
            "geometry": r.geometry.as_dict(),
            "profile": {
                "data_qubits": r.profile.data_qubits,
                "ancilla_qubits": r.profile.ancilla_qubits,
                "max_core_qubits": r.profile.max_core_qubits,
            },
            "serial_upper_bound_us": _num(r.schedule.upper_bound),
        }
    p = mapping.params
    out = {
        "total_latency_us": _num(mapping.latency),
        "total_latency_exact": str(mapping.latency),
        "total_ancilla": mapping.total_ancilla,
        "params": {
            "k": p.k,
            "budget": p.budget,
            "alpha_int": p.alpha_int,
            "beta_pmd": _num(Fraction(p.beta_pmd)),
            "gamma_l2": _num(Fraction(p.gamma_l2)),
        },
        "qec": mapping.qec.name,
        "post_order": list(mapping.modules),
        "unreachable": list(mapping.unreachable),
        "memo": {"hits": mapping.memo_hits, "misses": mapping.memo_misses},
        "modules": modules,
    }
    if include_runtime:
        out["runtime_s"] = mapping.runtime_s
    return out


def report_json(mapping: ProgramMapping, include_runtime: bool = False) -> str:
    return json.dumps(report(mapping, include_runtime), sort_keys=True, indent=2) + "\n"


def format_final(prog: FinalProgram) -> tuple[str, str]:
    """Text of a final program and its MCL sidecar. Record i of the first is
    followed in the second by an ``@record i`` header and its MCL body."""
    lines = [f"# total_latency {prog.total_latency}"]
    mcl = []
    for i, r in enumerate(prog.records):
        core = "G" if r.core == GLOBAL else str(r.core)
        lines.append(f"{i} {r.kind} {core} {r.start} {r.duration} {','.join(r.operands)}")
        mcl.append(f"@record {i}\n{r.mcl.rstrip()}\n")
    return "\n".join(lines) + "\n", "".join(mcl)
