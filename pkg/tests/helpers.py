"""Random instance builders and independent reference computations."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from hqmap.hfqasm import Call, Gate, ModuleDef, QubitDecl, QubitRef
from hqmap.qmdg import build_qmdg
from hqmap.requp import STEANE_713
from hqmap.tables import unit_latencies

ONE = ("H", "X", "Z", "S", "T", "Tdag")


def random_module(rng: random.Random, n_stmts: int, n_qubits: int, call_prob: float = 0.0) -> ModuleDef:
    """A main-like module over register q[n_qubits]; calls go to 'Sub'."""
    body = []
    for _ in range(n_stmts):
        r = rng.random()
        if r < call_prob and n_qubits >= 2:
            body.append(Call("Sub", tuple(QubitRef("q", i) for i in rng.sample(range(n_qubits), 2))))
        elif r < call_prob + 0.4 and n_qubits >= 2:
            body.append(Gate("CNOT", tuple(QubitRef("q", i) for i in rng.sample(range(n_qubits), 2))))
        else:
            body.append(Gate(rng.choice(ONE), (QubitRef("q", rng.randrange(n_qubits)),)))
    return ModuleDef("main", (), (QubitDecl("q", n_qubits),), tuple(body))


def random_qmdg(seed: int, max_nodes: int = 40, call_prob: float = 0.0, latencies=None, call_duration=Fraction(5)):
    rng = random.Random(seed)
    mod = random_module(rng, rng.randint(1, max_nodes), rng.randint(1, 8), call_prob)
    lat = latencies or {k: Fraction(rng.randint(1, 9)) for k in unit_latencies()}
    return build_qmdg(mod, STEANE_713, lat, {"Sub": call_duration})


def statement_qubits(g) -> list[set]:
    return [set(n.operands) for n in sorted(g.nodes, key=lambda n: n.id)]


def reference_edges(g) -> dict[tuple[int, int], set]:
    """Quadratic scan: i -> j carries q when j is the next statement after i using q."""
    uses = statement_qubits(g)
    edges: dict[tuple[int, int], set] = {}
    for i, j in itertools.combinations(range(len(uses)), 2):
        for q in uses[i] & uses[j]:
            if not any(q in uses[m] for m in range(i + 1, j)):
                edges.setdefault((i + 1, j + 1), set()).add(q)
    return edges


def reference_levels(g) -> dict[int, int]:
    """Longest-path levels by repeated relaxation until nothing changes."""
    level = {n: 1 for n in g.node_ids}
    changed = True
    while changed:
        changed = False
        for e in g.edges:
            if level[e.dst] < level[e.src] + 1:
                level[e.dst] = level[e.src] + 1
                changed = True
    return level


def all_paths_longest(g, delay=None) -> Fraction:
    """Exhaustive enumeration of source-to-sink paths."""
    best = Fraction(0)
    sources = [n for n in g.node_ids if not g.in_edges(n)]

    def walk(nid, acc):
        nonlocal best
        acc = acc + g.node(nid).duration
        outs = g.out_edges(nid)
        if not outs:
            best = max(best, acc)
        for e in outs:
            walk(e.dst, acc + (delay(e) if delay else 0))

    for s in sources:
        walk(s, Fraction(0))
    return best


def enumerate_objective(w, d):
    """Minimum of the binding objective over all permutations."""
    k = len(w)
    best = None
    for perm in itertools.permutations(range(k)):
        val = sum(
            Fraction(w[m][x]) * Fraction(d[perm[m]][perm[x]]) for m in range(k) for x in range(k) if m != x
        )
        best = val if best is None else min(best, val)
    return best
