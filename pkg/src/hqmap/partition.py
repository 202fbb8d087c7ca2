"""Multi-constraint k-way partitioning of a QMDG.

Nodes on wide ASAP levels (at least k operations) get a one-hot weight
dimension per level; the partitioner keeps every such dimension balanced
so parallel operations land on different cores, and minimizes the edge cut
(weighted by the number of shared qubits) subject to that.

The scheme is multilevel: heavy-edge matching coarsens large graphs, a
greedy growing pass builds initial partitions on the coarsest graph, and
single-node boundary moves refine the projection back to the original
graph.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .qmdg import Qmdg


class InfeasibleBalance(RuntimeError):
    pass


@dataclass(frozen=True)
class WeightAssignment:
    levels: tuple[int, ...]  # qualifying level indices, ascending
    vectors: Mapping[int, tuple[int, ...]]

    @property
    def n_con(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class PartitionResult:
    k: int
    assignment: Mapping[int, int]  # node id -> part index
    edge_cut: int
    loads: tuple[tuple[int, ...], ...]  # per part, per balanced dimension
    tolerance: float

    @property
    def parts(self) -> tuple[tuple[int, ...], ...]:
        groups: list[list[int]] = [[] for _ in range(self.k)]
        for nid, p in sorted(self.assignment.items()):
            groups[p].append(nid)
        return tuple(tuple(g) for g in groups)


def assign_weights(g: Qmdg, k: int) -> WeightAssignment:
    if k < 1:
        raise ValueError("k must be at least 1")
    counts: dict[int, int] = {}
    for n in g.nodes:
        if not n.is_call:
            counts[g.levels[n.id]] = counts.get(g.levels[n.id], 0) + 1
    wide = tuple(sorted(lv for lv, c in counts.items() if c >= k))
    dim = {lv: j for j, lv in enumerate(wide)}
    vectors = {}
    for n in g.nodes:
        vec = [0] * len(wide)
        j = dim.get(g.levels[n.id])
        if j is not None and not n.is_call:
            vec[j] = 1
        vectors[n.id] = tuple(vec)
    return WeightAssignment(wide, vectors)


def balance_vectors(g: Qmdg, w: WeightAssignment) -> dict[int, tuple[int, ...]]:
    """Weight vectors actually balanced: the one-hot ones, or operation
    counts as a single dimension when no level is wide enough."""
    if w.n_con:
        return dict(w.vectors)
    return {n.id: (0,) if n.is_call else (1,) for n in g.nodes}


def balance_caps(column_sums: Sequence[int], k: int, tolerance: float) -> list[float]:
    """Per-dimension maximum part load; dimensions summing below k are free."""
    return [
        math.floor(tolerance * math.ceil(s / k) + 1e-9) if s >= k else math.inf
        for s in column_sums
    ]


def part_loads(vectors: Mapping[int, Sequence[int]], assignment: Mapping[int, int], k: int) -> list[list[int]]:
    dims = len(next(iter(vectors.values()), ()))
    loads = [[0] * dims for _ in range(k)]
    for nid, p in assignment.items():
        for j, x in enumerate(vectors[nid]):
            loads[p][j] += x
    return loads


def is_balanced(
    g: Qmdg, w: WeightAssignment, assignment: Mapping[int, int], k: int, tolerance: float = 1.5
) -> bool:
    vectors = balance_vectors(g, w)
    loads = part_loads(vectors, assignment, k)
    sums = [sum(col) for col in zip(*loads)] if loads and loads[0] else []
    caps = balance_caps(sums, k, tolerance)
    return all(load[j] <= caps[j] for load in loads for j in range(len(caps)))


def cut_weight(g: Qmdg, parts: Mapping[int, int] | Iterable[Iterable[int]]) -> int:
    """Total shared-qubit count over edges whose endpoints sit in different parts."""
    if isinstance(parts, Mapping):
        where = dict(parts)
    else:
        where = {nid: p for p, members in enumerate(parts) for nid in members}
    return sum(len(e.shared) for e in g.edges if where[e.src] != where[e.dst])


def dump_parts(result: PartitionResult) -> str:
    return "".join(f"{i}: {' '.join(map(str, part))}\n" for i, part in enumerate(result.parts))


# --- multilevel machinery -------------------------------------------------


class _Graph:
    __slots__ = ("vwgt", "adj", "key", "members")

    def __init__(self, vwgt, adj, key, members):
        self.vwgt: list[tuple[int, ...]] = vwgt
        self.adj: list[dict[int, int]] = adj
        self.key: list[int] = key  # smallest original node id, for tie-breaking
        self.members: list[list[int]] = members

    def __len__(self) -> int:
        return len(self.vwgt)


def _base_graph(g: Qmdg, vectors: Mapping[int, tuple[int, ...]]) -> _Graph:
    ids = sorted(g.node_ids)
    pos = {nid: i for i, nid in enumerate(ids)}
    adj: list[dict[int, int]] = [dict() for _ in ids]
    for e in g.edges:
        a, b = pos[e.src], pos[e.dst]
        adj[a][b] = adj[a].get(b, 0) + len(e.shared)
        adj[b][a] = adj[b].get(a, 0) + len(e.shared)
    return _Graph([vectors[nid] for nid in ids], adj, ids, [[nid] for nid in ids])


class _Partitioner:
    def __init__(self, g: Qmdg, w: WeightAssignment, k: int, tolerance: float, seed: int,
                 coarsen_threshold: int, trials: int):
        self.g = g
        self.k = k
        self.tolerance = tolerance
        self.rng = random.Random(seed)
        self.coarsen_threshold = coarsen_threshold
        self.trials = trials
        self.one_hot = w.n_con > 0
        self.vectors = balance_vectors(g, w)
        self.dims = len(next(iter(self.vectors.values()), ()))
        sums = [sum(v[j] for v in self.vectors.values()) for j in range(self.dims)]
        self.sums = sums
        self.caps = balance_caps(sums, k, tolerance)
        # coarse vertices stay well under a part's share in the implicit dimension
        self.merge_limit = [max(1, math.ceil(s / k) // 2) for s in sums]

    # coarsening

    def _may_merge(self, a: tuple[int, ...], b: tuple[int, ...]) -> bool:
        for j in range(self.dims):
            if self.one_hot:
                if a[j] and b[j]:
                    return False
            elif a[j] + b[j] > self.merge_limit[j]:
                return False
        return True

    def _coarsen(self, graph: _Graph) -> tuple[_Graph, list[int]] | None:
        order = list(range(len(graph)))
        self.rng.shuffle(order)
        match = [-1] * len(graph)
        for v in order:
            if match[v] >= 0:
                continue
            best, best_w = -1, 0
            for u, wt in graph.adj[v].items():
                if match[u] >= 0 or u == v or not self._may_merge(graph.vwgt[v], graph.vwgt[u]):
                    continue
                if wt > best_w or (wt == best_w and graph.key[u] < graph.key[best]):
                    best, best_w = u, wt
            match[v] = best if best >= 0 else v
            if best >= 0:
                match[best] = v
        cmap = [-1] * len(graph)
        groups: list[list[int]] = []
        for v in sorted(range(len(graph)), key=lambda x: graph.key[x]):
            if cmap[v] < 0:
                cmap[v] = cmap[match[v]] = len(groups)
                groups.append([v] if match[v] == v else [v, match[v]])
        if len(groups) > 0.9 * len(graph):
            return None
        vwgt = [tuple(map(sum, zip(*(graph.vwgt[v] for v in grp)))) if self.dims else () for grp in groups]
        adj: list[dict[int, int]] = [dict() for _ in groups]
        for v in range(len(graph)):
            cv = cmap[v]
            for u, wt in graph.adj[v].items():
                cu = cmap[u]
                if cu != cv:
                    adj[cv][cu] = adj[cv].get(cu, 0) + wt
        key = [min(graph.key[v] for v in grp) for grp in groups]
        members = [sorted(m for v in grp for m in graph.members[v]) for grp in groups]
        return _Graph(vwgt, adj, key, members), cmap

    # helpers on a partition of some graph level

    def _loads(self, graph: _Graph, where: list[int]) -> list[list[int]]:
        loads = [[0] * self.dims for _ in range(self.k)]
        for v, p in enumerate(where):
            for j, x in enumerate(graph.vwgt[v]):
                loads[p][j] += x
        return loads

    def _fits(self, load: list[int], wv: tuple[int, ...]) -> bool:
        return all(load[j] + wv[j] <= self.caps[j] for j in range(self.dims))

    def _conn(self, graph: _Graph, where: list[int], v: int) -> list[int]:
        conn = [0] * self.k
        for u, wt in graph.adj[v].items():
            if where[u] >= 0:
                conn[where[u]] += wt
        return conn

    def _greedy(self, graph: _Graph, order: list[int]) -> list[int]:
        where = [-1] * len(graph)
        loads = [[0] * self.dims for _ in range(self.k)]
        sizes = [0] * self.k
        for v in order:
            wv = graph.vwgt[v]
            conn = self._conn(graph, where, v)
            options = [p for p in range(self.k) if self._fits(loads[p], wv)] or list(range(self.k))
            nz = [j for j in range(self.dims) if wv[j]]
            p = min(options, key=lambda q: (-conn[q], sum(loads[q][j] for j in nz), sizes[q], q))
            where[v] = p
            sizes[p] += 1
            for j in range(self.dims):
                loads[p][j] += wv[j]
        return where

    def _rebalance(self, graph: _Graph, where: list[int]) -> None:
        loads = self._loads(graph, where)
        while True:
            over = [(p, j) for p in range(self.k) for j in range(self.dims) if loads[p][j] > self.caps[j]]
            if not over:
                return
            best = None
            for p, j in over:
                for v in range(len(graph)):
                    if where[v] != p or not graph.vwgt[v][j]:
                        continue
                    conn = self._conn(graph, where, v)
                    for q in range(self.k):
                        if q != p and self._fits(loads[q], graph.vwgt[v]):
                            cand = (conn[p] - conn[q], graph.key[v], q, v, p)
                            if best is None or cand < best:
                                best = cand
                if best is not None:
                    break
            if best is None:
                return
            _, _, q, v, p = best
            self._move(graph, where, loads, v, p, q)

    def _move(self, graph, where, loads, v, p, q) -> None:
        where[v] = q
        for j, x in enumerate(graph.vwgt[v]):
            loads[p][j] -= x
            loads[q][j] += x

    def _refine(self, graph: _Graph, where: list[int]) -> None:
        self._rebalance(graph, where)
        loads = self._loads(graph, where)
        while True:
            best = None
            for v in range(len(graph)):
                p = where[v]
                conn = self._conn(graph, where, v)
                for q in range(self.k):
                    if q == p or conn[q] <= conn[p]:
                        continue
                    if not self._fits(loads[q], graph.vwgt[v]):
                        continue
                    cand = (-(conn[q] - conn[p]), graph.key[v], q, v)
                    if best is None or cand < best:
                        best = cand
            if best is None:
                return
            _, _, q, v = best
            self._move(graph, where, loads, v, where[v], q)

    def _cut(self, graph: _Graph, where: list[int]) -> int:
        return sum(wt for v in range(len(graph)) for u, wt in graph.adj[v].items() if u > v and where[u] != where[v])

    def _overflow(self, graph: _Graph, where: list[int]) -> float:
        loads = self._loads(graph, where)
        return sum(max(0, loads[p][j] - self.caps[j]) for p in range(self.k) for j in range(self.dims))

    def run(self) -> dict[int, int]:
        base = _base_graph(self.g, self.vectors)
        if self.k == 1 or len(base) == 0:
            return {nid: 0 for nid in self.g.node_ids}
        hierarchy: list[tuple[_Graph, list[int] | None]] = [(base, None)]
        graph = base
        while len(graph) > self.coarsen_threshold:
            step = self._coarsen(graph)
            if step is None:
                break
            graph, cmap = step
            hierarchy.append((graph, cmap))

        coarsest = hierarchy[-1][0]
        by_key = sorted(range(len(coarsest)), key=lambda v: coarsest.key[v])
        orders = [by_key, by_key[::-1]]
        for _ in range(max(0, self.trials - 2)):
            shuffled = by_key[:]
            self.rng.shuffle(shuffled)
            orders.append(shuffled)

        best = None
        for order in orders:
            where = self._greedy(coarsest, order)
            for level in range(len(hierarchy) - 1, -1, -1):
                graph, cmap = hierarchy[level]
                self._refine(graph, where)
                if level > 0:
                    finer = hierarchy[level - 1][0]
                    where = [where[cmap[v]] for v in range(len(finer))]
            score = (self._overflow(base, where), self._cut(base, where))
            if best is None or score < best[0]:
                best = (score, where)
        where = best[1]
        return {base.key[v]: where[v] for v in range(len(base))}


def partition(
    g: Qmdg,
    w: WeightAssignment,
    k: int,
    tolerance: float = 1.5,
    seed: int = 0,
    coarsen_threshold: int = 64,
    trials: int = 6,
) -> PartitionResult:
    """Split ``g`` into ``k`` parts (some may be empty when k exceeds the
    node count), balancing every weight dimension within ``tolerance`` and
    locally minimizing the edge cut. Deterministic for a given ``seed``."""
    if tolerance < 1.0:
        raise ValueError("balance tolerance must be at least 1.0")
    worker = _Partitioner(g, w, k, tolerance, seed, coarsen_threshold, trials)
    assignment = worker.run()
    loads = part_loads(worker.vectors, assignment, k)
    if any(load[j] > worker.caps[j] for load in loads for j in range(worker.dims)):
        raise InfeasibleBalance(f"could not balance module {g.module_name} into {k} parts")
    return PartitionResult(k, assignment, cut_weight(g, assignment), tuple(map(tuple, loads)), tolerance)
