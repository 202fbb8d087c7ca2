from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import all_paths_longest, random_qmdg, reference_edges, reference_levels
from hqmap.hfqasm import parse
from hqmap.qmdg import build_call_dag, build_qmdg, critical_path, dump_qmdg, levelize, serial_length
from hqmap.requp import QecProfile, STEANE_713
from hqmap.tables import MissingProfile, unit_latencies

# Derived by a by-hand pairwise scan of the Toffoli gate list under the
# first-later-use rule.
TOFFOLI_EDGES = {
    (1, 2), (2, 3), (2, 6), (3, 4), (4, 5), (4, 8), (5, 6), (6, 7), (6, 9),
    (7, 8), (8, 10), (8, 11), (9, 11), (10, 12), (11, 13), (11, 14), (13, 15), (14, 15),
}


def one_module(body: str):
    return parse(f"module main(){{ qbit q[4]; {body} }}").main


def test_toffoli_nodes_and_edges(toffoli):
    assert len(toffoli.nodes) == 15
    assert {(e.src, e.dst) for e in toffoli.edges} == TOFFOLI_EDGES


def test_toffoli_edge_labels_match_reference(toffoli):
    ref = reference_edges(toffoli)
    assert {(e.src, e.dst): set(e.shared) for e in toffoli.edges} == ref


def test_toffoli_levels(toffoli):
    sets = toffoli.level_sets()
    assert len(sets) == 11
    assert sets[7] == [7, 9] and sets[9] == [10, 11] and sets[10] == [12, 13, 14]
    assert all(len(v) == 1 for lv, v in sets.items() if lv not in (7, 9, 10))


def test_toffoli_critical_path_unit(toffoli):
    assert critical_path(toffoli) == 11


def test_toffoli_annotations(toffoli):
    node = toffoli.node(3)
    assert node.name == "Tdag" and node.ancilla == 100 and node.duration == 1
    assert toffoli.node(2).ancilla == 56


def test_single_gate():
    g = build_qmdg(one_module("H(q[0]);"), STEANE_713, unit_latencies())
    assert len(g.nodes) == 1 and g.edges == ()


def test_fredkin_main_is_call_chain(fredkin_ast):
    g = build_qmdg(fredkin_ast.main, STEANE_713, unit_latencies(), {"Toffoli": Fraction(11)})
    assert [n.kind for n in g.nodes] == ["call"] * 3
    assert [(e.src, e.dst) for e in g.edges] == [(1, 2), (2, 3)]
    assert all(("a", 0) in e.shared for e in g.edges)
    assert all(n.duration == 11 for n in g.nodes)
    assert g.node(1).operands == (("a", 0), ("a", 2), ("a", 1))


def test_whole_array_call_operands_expand():
    ast = parse("module A(qbit *x){ H(x[0]); } module main(){ qbit r[3]; A(r); }")
    g = build_qmdg(ast.main, STEANE_713, unit_latencies())
    assert g.node(1).operands == (("r", 0), ("r", 1), ("r", 2))


def test_missing_profile_and_latency():
    small = QecProfile("tiny", 7, {"H": 1})
    with pytest.raises(MissingProfile):
        build_qmdg(one_module("X(q[0]);"), small, unit_latencies())
    with pytest.raises(MissingProfile):
        build_qmdg(one_module("H(q[0]);"), small, {})


def test_call_dag_post_orders(fredkin_ast):
    assert build_call_dag(fredkin_ast).post_order == ("Toffoli", "main")
    assert build_call_dag(parse("module main(){ qbit q; H(q); }")).post_order == ("main",)
    diamond = parse(
        "module C(qbit x){ H(x); } module A(qbit x){ C(x); } module B(qbit x){ C(x); }"
        " module U(qbit x){ X(x); } module main(){ qbit q; A(q); B(q); }"
    )
    dag = build_call_dag(diamond)
    assert dag.post_order == ("C", "A", "B", "main")
    assert dag.unreachable == ("U",)


def test_levels_simple_shapes():
    chain = build_qmdg(one_module("H(q[0]); X(q[0]); Z(q[0]);"), STEANE_713, unit_latencies())
    assert levelize(chain) == {1: 1, 2: 2, 3: 3}
    indep = build_qmdg(one_module("H(q[0]); H(q[1]); H(q[2]);"), STEANE_713, unit_latencies())
    assert set(levelize(indep).values()) == {1}


def test_critical_path_parallel_nodes():
    lat = {**unit_latencies(), "H": Fraction(3), "X": Fraction(7)}
    g = build_qmdg(one_module("H(q[0]); X(q[1]);"), STEANE_713, lat)
    assert critical_path(g) == 7


def test_dump_lines(toffoli):
    text = dump_qmdg(toffoli)
    assert "node 7 op:Tdag level=7" in text
    assert "edge 2 6 c2" in text


# --- properties ------------------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.floats(0, 0.3))
def test_edges_match_quadratic_oracle(seed, call_prob):
    g = random_qmdg(seed, max_nodes=60, call_prob=call_prob)
    assert {(e.src, e.dst): set(e.shared) for e in g.edges} == reference_edges(g)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_qubit_users_form_chains(seed):
    g = random_qmdg(seed, max_nodes=50)
    users: dict = {}
    for n in g.nodes:
        for q in n.operands:
            users.setdefault(q, []).append(n.id)
    labeled = {(e.src, e.dst, q) for e in g.edges for q in e.shared}
    for q, ids in users.items():
        assert {(a, b, q) for a, b in zip(ids, ids[1:])} == {t for t in labeled if t[2] == q}


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_levels_match_relaxation(seed):
    g = random_qmdg(seed, max_nodes=50)
    assert dict(g.levels) == reference_levels(g)
    assert sum(len(v) for v in g.level_sets().values()) == len(g.nodes)
    for e in g.edges:
        assert g.levels[e.dst] >= g.levels[e.src] + 1


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 4))
def test_critical_path_matches_path_enumeration(seed, gap):
    g = random_qmdg(seed, max_nodes=14)
    delay = (lambda e: Fraction(gap * len(e.shared)))
    assert critical_path(g, delay) == all_paths_longest(g, delay)
    assert critical_path(g, delay) <= serial_length(g, delay)
