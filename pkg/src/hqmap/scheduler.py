"""Resource-constrained list scheduling of a partitioned, bound QMDG.

Times are exact rationals in µs. Operations run on the core their part is
bound to and hold their physical ancilla for their whole duration; module
calls run alone, occupying the whole processor. Every edge x -> y imposes
``start(y) >= start(x) + duration(x) + delay(x, y)``, where the delay is the
routing delay between the two cores for operation pairs and the
reconfiguration delay whenever a module call is involved.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .qmdg import Qmdg, QmdgEdge

GLOBAL = -1  # core marker for module calls

ReconfigFn = Callable[[QmdgEdge], Fraction]


@dataclass(frozen=True)
class ScheduleEntry:
    start: Fraction
    core: int
    duration: Fraction

    @property
    def end(self) -> Fraction:
        return self.start + self.duration


@dataclass(frozen=True)
class Schedule:
    entries: Mapping[int, ScheduleEntry]
    makespan: Fraction
    upper_bound: Fraction  # serial length: all durations plus all edge delays


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


class EdgeDelays:
    """Delay charged on each QMDG edge for a given partition and binding."""

    def __init__(self, g: Qmdg, assignment: Mapping[int, int], binding: Sequence[int],
                 d: Sequence[Sequence], reconfig: ReconfigFn | None = None):
        self.g = g
        self.assignment = assignment
        self.binding = binding
        self.d = getattr(d, "d", d)
        self.reconfig = reconfig

    def core(self, nid: int) -> int:
        if self.g.node(nid).is_call:
            return GLOBAL
        return self.binding[self.assignment[nid]]

    def __call__(self, e: QmdgEdge) -> Fraction:
        if self.g.node(e.src).is_call or self.g.node(e.dst).is_call:
            return Fraction(self.reconfig(e)) if self.reconfig else Fraction(0)
        return Fraction(self.d[self.core(e.src)][self.core(e.dst)])


def priority(g: Qmdg, delay: Callable[[QmdgEdge], Fraction] | None = None) -> list[int]:
    """Node ids by descending longest path to a sink (durations plus edge
    delays), ties by ascending id."""
    rank = ranks(g, delay)
    return sorted(g.node_ids, key=lambda n: (-rank[n], n))


def ranks(g: Qmdg, delay) -> dict[int, Fraction]:
    rank: dict[int, Fraction] = {}
    for nid in sorted(g.node_ids, reverse=True):
        tail = Fraction(0)
        for e in g.out_edges(nid):
            tail = max(tail, (delay(e) if delay else 0) + rank[e.dst])
        rank[nid] = g.node(nid).duration + tail
    return rank


def schedule(
    g: Qmdg,
    assignment: Mapping[int, int],
    binding: Sequence[int],
    d,
    reconfig: ReconfigFn | None = None,
    capacity: int | None = None,
) -> Schedule:
    """List-schedule ``g``.

    ``capacity`` is the physical ancilla available per core (defaults to
    unlimited). At every event time the ready nodes are tried in priority
    order; once a ready module call cannot start, nothing of lower priority
    starts either, so the processor drains and the call goes next.
    """
    delays = EdgeDelays(g, assignment, binding, d, reconfig)
    rank = ranks(g, delays)
    order_key = {nid: (-rank[nid], nid) for nid in g.node_ids}
    npred = {nid: len(g.in_edges(nid)) for nid in g.node_ids}
    earliest: dict[int, Fraction] = {nid: Fraction(0) for nid in g.node_ids}
    enabled = [nid for nid in g.node_ids if npred[nid] == 0]
    entries: dict[int, ScheduleEntry] = {}
    in_use: dict[int, int] = {}
    running: list[tuple[Fraction, int]] = []  # (end, node)
    call_running = False
    t = Fraction(0)

    while len(entries) < len(g.nodes):
        while running and running[0][0] <= t:
            _, done = heapq.heappop(running)
            node = g.node(done)
            if node.is_call:
                call_running = False
            else:
                c = entries[done].core
                in_use[c] -= node.ancilla
        ready = sorted((n for n in enabled if earliest[n] <= t), key=order_key.__getitem__)
        for nid in ready:
            node = g.node(nid)
            if node.is_call:
                if running:
                    break
                core = GLOBAL
                call_running = True
            else:
                if call_running:
                    break
                core = delays.core(nid)
                if capacity is not None and in_use.get(core, 0) + node.ancilla > capacity:
                    continue
                in_use[core] = in_use.get(core, 0) + node.ancilla
            entry = ScheduleEntry(t, core, node.duration)
            entries[nid] = entry
            enabled.remove(nid)
            heapq.heappush(running, (entry.end, nid))
            for e in g.out_edges(nid):
                earliest[e.dst] = max(earliest[e.dst], entry.end + delays(e))
                npred[e.dst] -= 1
                if npred[e.dst] == 0:
                    enabled.append(e.dst)
            if node.is_call:
                break
        if len(entries) == len(g.nodes):
            break
        upcoming = [earliest[n] for n in enabled if earliest[n] > t]
        if running:
            upcoming.append(running[0][0])
        if not upcoming:
            blocked = ", ".join(str(n) for n in enabled)
            raise RuntimeError(f"scheduler stalled at t={t} with ready nodes {blocked}; capacity too small?")
        t = min(upcoming)

    makespan = max((e.end for e in entries.values()), default=Fraction(0))
    upper = sum((n.duration for n in g.nodes), Fraction(0)) + sum((delays(e) for e in g.edges), Fraction(0))
    return Schedule(dict(sorted(entries.items())), makespan, upper)


def verify(
    sched: Schedule,
    g: Qmdg,
    assignment: Mapping[int, int],
    binding: Sequence[int],
    d,
    reconfig: ReconfigFn | None = None,
    capacity: int | None = None,
) -> list[Violation]:
    """Recheck a schedule from scratch: coverage, durations, cores,
    precedence gaps, per-core ancilla capacity, module exclusivity and the
    makespan bounds. Returns an empty list for a feasible schedule."""
    out: list[Violation] = []
    rows = getattr(d, "d", d)
    nodes = {n.id: n for n in g.nodes}
    for nid in nodes:
        if nid not in sched.entries:
            out.append(Violation("Unscheduled", f"node {nid} has no start time"))
    for nid in sched.entries:
        if nid not in nodes:
            out.append(Violation("UnknownNode", f"schedule lists unknown node {nid}"))
    if out:
        return out

    def core_of(nid: int) -> int:
        return GLOBAL if nodes[nid].is_call else binding[assignment[nid]]

    for nid, e in sched.entries.items():
        n = nodes[nid]
        if e.start < 0:
            out.append(Violation("NegativeStart", f"node {nid} starts at {e.start}"))
        if e.duration != n.duration:
            out.append(Violation("DurationMismatch", f"node {nid}: {e.duration} != {n.duration}"))
        if e.core != core_of(nid):
            out.append(Violation("CoreMismatch", f"node {nid} on core {e.core}, bound to {core_of(nid)}"))

    serial = sum((n.duration for n in g.nodes), Fraction(0))
    for edge in g.edges:
        x, y = sched.entries[edge.src], sched.entries[edge.dst]
        if nodes[edge.src].is_call or nodes[edge.dst].is_call:
            gap = Fraction(reconfig(edge)) if reconfig else Fraction(0)
        else:
            gap = Fraction(rows[core_of(edge.src)][core_of(edge.dst)])
        serial += gap
        if x.start + x.duration + gap > y.start:
            out.append(
                Violation(
                    "PrecedenceViolated",
                    f"edge {edge.src}->{edge.dst}: {x.start}+{x.duration}+{gap} > {y.start}",
                )
            )

    if capacity is not None:
        per_core: dict[int, list[tuple[Fraction, int]]] = {}
        for nid, e in sched.entries.items():
            if nodes[nid].is_call:
                continue
            events = per_core.setdefault(e.core, [])
            events.append((e.start, nodes[nid].ancilla))
            events.append((e.start + e.duration, -nodes[nid].ancilla))
        for core, events in sorted(per_core.items()):
            level = 0
            # releases sort before acquisitions at the same instant
            for when, delta in sorted(events, key=lambda ev: (ev[0], ev[1])):
                level += delta
                if level > capacity:
                    out.append(Violation("CapacityExceeded", f"core {core} uses {level} > {capacity} at t={when}"))
                    break

    calls = [nid for nid in sched.entries if nodes[nid].is_call]
    for c in calls:
        ce = sched.entries[c]
        for nid, e in sched.entries.items():
            if nid == c:
                continue
            if e.start < ce.end and ce.start < e.end:
                out.append(Violation("ModuleOverlap", f"module call {c} overlaps node {nid}"))

    makespan = max((e.start + e.duration for e in sched.entries.values()), default=Fraction(0))
    if makespan != sched.makespan:
        out.append(Violation("MakespanMismatch", f"reported {sched.makespan}, recomputed {makespan}"))
    if makespan > serial:
        out.append(Violation("UpperBoundExceeded", f"makespan {makespan} exceeds serial length {serial}"))
    return out


def dump_schedule(sched: Schedule, g: Qmdg) -> str:
    rows = sorted(sched.entries.items(), key=lambda kv: (kv[1].start, kv[0]))
    lines = []
    for nid, e in rows:
        node = g.node(nid)
        core = "G" if e.core == GLOBAL else str(e.core)
        lines.append(f"{nid} {node.name} {core} {_fmt(e.start)} {_fmt(e.duration)}")
    return "\n".join(lines) + "\n"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{float(x):.6f}".rstrip("0")
