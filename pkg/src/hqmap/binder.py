"""Part-to-core binding as a 0-1 quadratic assignment problem.

Minimizes sum over part pairs (m, x), m != x, of traffic w[m][x] times the
delay between their cores. Solved exactly by depth-first branch and bound
with an optional wall-clock timeout, after which the best permutation found
so far is returned.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .qmdg import Qmdg

Matrix = Sequence[Sequence]


@dataclass(frozen=True)
class Binding:
    assignment: tuple[int, ...]  # part index -> core index
    objective: Fraction
    proven_optimal: bool
    nodes_explored: int = 0


def traffic_matrix(g: Qmdg, assignment: Mapping[int, int], k: int) -> list[list[int]]:
    """Qubits moving from part m to part x along QMDG edges.

    Edges touching a module call are left out: crossing a module boundary is
    charged as reconfiguration, not as inter-core routing.
    """
    w = [[0] * k for _ in range(k)]
    for e in g.edges:
        if g.node(e.src).is_call or g.node(e.dst).is_call:
            continue
        m, x = assignment[e.src], assignment[e.dst]
        if m != x:
            w[m][x] += len(e.shared)
    return w


def objective(assignment: Sequence[int], w: Matrix, d: Matrix) -> Fraction:
    k = len(assignment)
    total = Fraction(0)
    for m in range(k):
        for x in range(k):
            if m != x and w[m][x]:
                total += w[m][x] * Fraction(d[assignment[m]][assignment[x]])
    return total


def brute_force(w: Matrix, d: Matrix) -> tuple[tuple[int, ...], Fraction]:
    """Exhaustive reference: the lexicographically first optimal permutation."""
    best = None
    for perm in itertools.permutations(range(len(w))):
        val = objective(perm, w, d)
        if best is None or val < best[1]:
            best = (perm, val)
    return best


class _Search:
    """Depth-first branch and bound over partial part-to-core maps.

    Delays are scaled to integers up front. The bound adds, for every
    pending part, the cheapest single core for its traffic with placed
    parts, and for traffic among pending parts the smallest pairing of
    pending traffic with free core-pair delays (rearrangement inequality).
    """

    def __init__(self, w: Matrix, d: Matrix, deadline: float | None):
        self.k = k = len(w)
        rows = [[Fraction(v) for v in row] for row in d]
        self.scale = math.lcm(*(v.denominator for row in rows for v in row))
        self.d = [[int(v * self.scale) for v in row] for row in rows]
        self.w = [[int(w[m][x]) if m != x else 0 for x in range(k)] for m in range(k)]
        self.pair = [[self.w[m][x] + self.w[x][m] for x in range(k)] for m in range(k)]
        self.sym = [[min(self.d[a][b], self.d[b][a]) for b in range(k)] for a in range(k)]
        self.deadline = deadline
        self.timed_out = False
        self.explored = 0
        traffic = [sum(self.pair[m]) for m in range(k)]
        self.part_order = sorted(range(k), key=lambda m: (-traffic[m], m))
        core_total = [sum(self.d[c][y] for y in range(k) if y != c) for c in range(k)]
        self.core_order = sorted(range(k), key=lambda c: (core_total[c], c))
        self.assign = [-1] * k
        self.best_val: int | None = None
        self.best: tuple[int, ...] | None = None

    def cost_of(self, perm: Sequence[int]) -> int:
        k = self.k
        return sum(self.w[m][x] * self.d[perm[m]][perm[x]] for m in range(k) for x in range(k) if m != x)

    def offer(self, perm: Sequence[int]) -> None:
        val = self.cost_of(perm)
        if self.best_val is None or val < self.best_val:
            self.best_val, self.best = val, tuple(perm)

    def greedy(self) -> list[int]:
        perm = [-1] * self.k
        free = list(self.core_order)
        for depth, m in enumerate(self.part_order):
            placed = self.part_order[:depth]
            core = min(free, key=lambda c: sum(self.pair[m][x] * self.sym[c][perm[x]] for x in placed))
            perm[m] = core
            free.remove(core)
        return perm

    def _placement_cost(self, m: int, core: int, depth: int) -> int:
        cost = 0
        for x in self.part_order[:depth]:
            cx = self.assign[x]
            cost += self.w[m][x] * self.d[core][cx] + self.w[x][m] * self.d[cx][core]
        return cost

    def _bound(self, depth: int, free: list[int]) -> int:
        pending = self.part_order[depth:]
        placed = self.part_order[:depth]
        bound = 0
        if placed:
            for m in pending:
                links = [(self.pair[m][x], self.assign[x]) for x in placed if self.pair[m][x]]
                if links:
                    bound += min(sum(t * self.sym[c][cx] for t, cx in links) for c in free)
        traffic = sorted(
            (self.pair[a][b] for i, a in enumerate(pending) for b in pending[i + 1:]), reverse=True
        )
        if traffic and traffic[0]:
            delays = sorted(self.sym[a][b] for i, a in enumerate(free) for b in free[i + 1:])
            bound += sum(t * dl for t, dl in zip(traffic, delays))
        return bound

    def dfs(self, depth: int, cost: int, free: list[int]) -> None:
        self.explored += 1
        if self.deadline is not None and (self.explored & 255) == 0 and time.monotonic() > self.deadline:
            self.timed_out = True
        if self.timed_out:
            return
        if depth == self.k:
            if cost < self.best_val:
                self.best_val, self.best = cost, tuple(self.assign)
            return
        if cost + self._bound(depth, free) >= self.best_val:
            return
        m = self.part_order[depth]
        steps = sorted(((self._placement_cost(m, c, depth), i, c) for i, c in enumerate(free)))
        for step, _, core in steps:
            if cost + step >= self.best_val:
                continue
            self.assign[m] = core
            self.dfs(depth + 1, cost + step, [c for c in free if c != core])
            self.assign[m] = -1
            if self.timed_out:
                return


def bind(w: Matrix, d, timeout: float | None = 60.0) -> Binding:
    """Optimal one-to-one assignment of parts to cores.

    ``d`` is a k x k delay matrix or a :class:`RoutingMatrix`. With a timeout
    the search stops early and reports ``proven_optimal=False``. Among equal
    optima the identity wins when it is one of them.
    """
    rows = getattr(d, "d", d)
    k = len(w)
    if len(rows) != k:
        raise ValueError(f"traffic matrix is {k}x{k} but delay matrix has {len(rows)} rows")
    if k <= 1:
        return Binding(tuple(range(k)), Fraction(0), True, 0)
    deadline = None if timeout is None else time.monotonic() + timeout
    search = _Search(w, rows, deadline)
    # incumbents: identity first, so a timeout or a tie still yields it
    search.offer(range(k))
    search.offer(search.greedy())
    search.dfs(0, 0, list(search.core_order))
    return Binding(
        search.best, Fraction(search.best_val, search.scale), not search.timed_out, search.explored
    )


def dump_instance(w: Matrix, d) -> str:
    rows = getattr(d, "d", d)
    out = [str(len(w))]
    out += [" ".join(str(v) for v in row) for row in w]
    out += [" ".join(str(v) for v in row) for row in rows]
    return "\n".join(out) + "\n"
