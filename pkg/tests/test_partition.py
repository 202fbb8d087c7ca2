import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_qmdg
from hqmap.hfqasm import parse
from hqmap.partition import (
    assign_weights,
    balance_vectors,
    cut_weight,
    dump_parts,
    is_balanced,
    part_loads,
    partition,
)
from hqmap.qmdg import build_qmdg
from hqmap.requp import STEANE_713
from hqmap.tables import unit_latencies


def test_toffoli_weight_vectors(toffoli):
    w = assign_weights(toffoli, 2)
    assert w.levels == (7, 9, 10) and w.n_con == 3
    expected = {7: (1, 0, 0), 9: (1, 0, 0), 10: (0, 1, 0), 11: (0, 1, 0), 12: (0, 0, 1), 13: (0, 0, 1), 14: (0, 0, 1)}
    for nid in toffoli.node_ids:
        assert w.vectors[nid] == expected.get(nid, (0, 0, 0))


def test_k1_every_level_qualifies(toffoli):
    assert assign_weights(toffoli, 1).n_con == 11


def test_chain_has_no_dimensions():
    g = build_qmdg(parse("module main(){ qbit q; H(q); X(q); Z(q); S(q); T(q); }").main, STEANE_713, unit_latencies())
    w = assign_weights(g, 2)
    assert w.n_con == 0 and all(v == () for v in w.vectors.values())


def test_toffoli_k2_partition_loads(toffoli):
    w = assign_weights(toffoli, 2)
    res = partition(toffoli, w, 2, 1.5)
    assert sorted(res.loads) == [(1, 1, 1), (1, 1, 2)]
    assert res.edge_cut == cut_weight(toffoli, res.parts)
    assert is_balanced(toffoli, w, res.assignment, 2, 1.5)


def test_horizontal_cut_rejected(toffoli):
    w = assign_weights(toffoli, 2)
    top = {nid: (0 if nid <= 8 else 1) for nid in toffoli.node_ids}
    loads = part_loads(w.vectors, top, 2)
    assert sorted(map(tuple, loads)) == [(1, 0, 0), (1, 2, 3)]
    assert not is_balanced(toffoli, w, top, 2, 1.5)


def test_k1_single_part(toffoli):
    res = partition(toffoli, assign_weights(toffoli, 1), 1)
    assert res.edge_cut == 0 and len(res.parts) == 1 and len(res.parts[0]) == 15


def test_disconnected_components_split_for_free():
    text = "module main(){ qbit q[2]; H(q[0]); X(q[0]); H(q[1]); X(q[1]); }"
    g = build_qmdg(parse(text).main, STEANE_713, unit_latencies())
    assert cut_weight(g, [{1, 2}, {3, 4}]) == 0
    res = partition(g, assign_weights(g, 2), 2)
    assert res.edge_cut == 0


def test_cut_weight_counts_shared_qubits(toffoli):
    parts = [set(range(1, 9)), set(range(9, 16))]
    expected = sum(len(e.shared) for e in toffoli.edges if (e.src <= 8) != (e.dst <= 8))
    assert cut_weight(toffoli, parts) == expected == 3


def test_dump_parts(toffoli):
    res = partition(toffoli, assign_weights(toffoli, 2), 2)
    lines = dump_parts(res).splitlines()
    assert len(lines) == 2 and lines[0].startswith("0: ")


def test_tolerance_below_one_rejected(toffoli):
    with pytest.raises(ValueError):
        partition(toffoli, assign_weights(toffoli, 2), 2, 0.9)


def test_deterministic(toffoli):
    w = assign_weights(toffoli, 3)
    assert partition(toffoli, w, 3, seed=4).assignment == partition(toffoli, w, 3, seed=4).assignment


# --- properties ------------------------------------------------------------


def _caps(sums, k, tol):
    return [tol * math.ceil(s / k) if s >= k else math.inf for s in sums]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4]), st.floats(0, 0.2))
def test_partition_properties(seed, k, call_prob):
    g = random_qmdg(seed, max_nodes=60, call_prob=call_prob)
    if len(g.nodes) < k:
        return
    w = assign_weights(g, k)
    for j in range(w.n_con):
        assert sum(v[j] for v in w.vectors.values()) == sum(
            1 for n in g.nodes if not n.is_call and g.levels[n.id] == w.levels[j]
        )
    res = partition(g, w, k, 1.5, seed=seed)
    # coverage and disjointness
    assert set(res.assignment) == set(g.node_ids)
    assert all(0 <= p < k for p in res.assignment.values())
    # reported values match recomputation
    vectors = balance_vectors(g, w)
    loads = part_loads(vectors, res.assignment, k)
    assert [list(x) for x in res.loads] == loads
    assert res.edge_cut == cut_weight(g, res.assignment)
    sums = [sum(col) for col in zip(*loads)]
    caps = _caps(sums, k, 1.5)
    assert all(load[j] <= caps[j] for load in loads for j in range(len(caps)))
    # no balance-preserving single move lowers the cut
    for nid in g.node_ids:
        for p in range(k):
            if p == res.assignment[nid]:
                continue
            moved = dict(res.assignment)
            moved[nid] = p
            after = part_loads(vectors, moved, k)
            if all(load[j] <= caps[j] for load in after for j in range(len(caps))):
                assert cut_weight(g, moved) >= res.edge_cut
