import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from netident import Digraph, TopologyClass, classify_topology, count_paths, diameter, scc, sinks, sources
from netident import unique_path_inneighbor
from netident.errors import IsSource, NotAcyclic, NotWeaklyConnected, UnknownNode
from netident.generators import random_dag, random_digraph

SIX = [(2, 1), (3, 2), (4, 3), (1, 4), (3, 1), (2, 5), (6, 5), (3, 6)]
EXAMPLE_DAG = [(2, 1), (3, 2), (3, 1)]
BRIDGE = [(2, 1), (3, 1), (4, 2), (4, 3)]


@st.composite
def digraphs(draw, max_nodes=8, acyclic=False):
    n = draw(st.integers(1, max_nodes))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    if n == 1:
        return Digraph(1)
    if acyclic:
        return random_dag(n, rng, extra=draw(st.floats(0.0, 0.7)))
    return random_digraph(n, rng, density=draw(st.floats(0.0, 0.6)), cyclic=draw(st.booleans()))


def test_edge_validation():
    with pytest.raises(ValueError):
        Digraph(2, [(1, 1)])
    with pytest.raises(ValueError):
        Digraph(2, [(3, 1)])
    g = Digraph(3, EXAMPLE_DAG)
    with pytest.raises(UnknownNode):
        g.in_neighbors(4)


def test_six_node_condensation():
    cond = scc(Digraph(6, SIX))
    assert [set(c) for c in cond.components] == [{1, 2, 3, 4}, {5}, {6}]
    assert cond.quotient.edges == {(1, 2), (3, 2), (1, 3)}
    assert cond.sink_components() == [1]
    assert cond.component_of[3] == 1 and cond.component_of[6] == 3


def test_condensation_dot_labels():
    dot = scc(Digraph(6, SIX)).to_dot()
    assert '"C2{5}" -> "C1{1,2,3,4}";' in dot
    assert '"C3{6}" -> "C1{1,2,3,4}";' in dot


def test_singleton():
    cond = scc(Digraph(1))
    assert [set(c) for c in cond.components] == [{1}]
    assert sinks(Digraph(1)) == {1} and sources(Digraph(1)) == {1}


def test_not_weakly_connected():
    g = Digraph(3, [(2, 1)])
    with pytest.raises(NotWeaklyConnected):
        classify_topology(g)
    with pytest.raises(NotWeaklyConnected):
        diameter(g)
    # components are still defined
    assert len(scc(g).components) == 3


@settings(max_examples=60, deadline=None)
@given(digraphs())
def test_scc_matches_mutual_reachability(g):
    got = sorted((frozenset(c) for c in scc(g).components), key=min)
    assert got == oracles.brute_components(g.node_count, g.edges)


@settings(max_examples=60, deadline=None)
@given(digraphs())
def test_quotient_is_acyclic_and_consistent(g):
    cond = scc(g)
    assert cond.quotient.is_acyclic()
    for to, frm in g.edges:
        a, b = cond.component_of[to], cond.component_of[frm]
        assert a == b or cond.quotient.has_edge(a, b)


def test_sinks_sources():
    assert (sinks(Digraph(3, EXAMPLE_DAG)), sources(Digraph(3, EXAMPLE_DAG))) == ({3}, {1})
    cycle = Digraph(2, [(1, 2), (2, 1)])
    assert (sinks(cycle), sources(cycle)) == (set(), set())
    assert (sinks(Digraph(4, BRIDGE)), sources(Digraph(4, BRIDGE))) == ({4}, {1})


def test_topology_classes():
    assert classify_topology(Digraph(3, [(2, 1), (3, 2)])) is TopologyClass.PATH_GRAPH
    assert classify_topology(Digraph(3, EXAMPLE_DAG)) is TopologyClass.DAG
    assert classify_topology(Digraph(2, [(1, 2), (2, 1)])) is TopologyClass.GENERAL
    assert classify_topology(Digraph(3, [(2, 1), (3, 1)])) is TopologyClass.ARBORESCENCE
    assert classify_topology(Digraph(3, [(3, 1), (3, 2)])) is TopologyClass.TREE
    assert TopologyClass.PATH_GRAPH.within(TopologyClass.DAG)
    assert not TopologyClass.GENERAL.within(TopologyClass.DAG)


@settings(max_examples=40, deadline=None)
@given(digraphs(max_nodes=6))
def test_acyclicity_matches_exhaustive_order_search(g):
    assert g.is_acyclic() == oracles.has_topological_order(g.node_count, g.edges)
    assert g.is_acyclic() == (not oracles.has_directed_cycle(g.node_count, g.edges))


def test_count_paths_examples():
    g = Digraph(3, EXAMPLE_DAG)
    assert count_paths(g, 1, 3) == 2
    assert count_paths(g, 3, 1) == 0
    assert count_paths(g, 2, 2) == 1
    with pytest.raises(NotAcyclic):
        count_paths(Digraph(2, [(1, 2), (2, 1)]), 1, 2)


@settings(max_examples=50, deadline=None)
@given(digraphs(max_nodes=7, acyclic=True), st.integers(2, 5))
def test_count_paths_matches_enumeration(g, cap):
    for a in g.nodes:
        for b in g.nodes:
            exact = len(oracles.all_paths(g.node_count, g.edges, a, b))
            assert count_paths(g, a, b, cap=cap) == min(cap, exact)


def test_unique_path_inneighbor_examples():
    assert unique_path_inneighbor(Digraph(3, EXAMPLE_DAG), 3) == 2
    assert unique_path_inneighbor(Digraph(3, [(2, 1), (3, 2)]), 2) == 1
    with pytest.raises(IsSource):
        unique_path_inneighbor(Digraph(3, EXAMPLE_DAG), 1)


@settings(max_examples=80, deadline=None)
@given(digraphs(max_nodes=10, acyclic=True))
def test_unique_path_inneighbor_property(g):
    for i in g.nodes:
        if not g.in_neighbors(i):
            continue
        j = unique_path_inneighbor(g, i)
        assert len(oracles.all_paths(g.node_count, g.edges, j, i)) == 1


def test_diameter_examples():
    assert diameter(Digraph(3, [(2, 1), (3, 2)])) == 2
    assert diameter(Digraph(2, [(1, 2), (2, 1)])) == 1
    assert diameter(Digraph(6, SIX)) == oracles.bfs_diameter(6, SIX)


@settings(max_examples=60, deadline=None)
@given(digraphs())
def test_diameter_matches_bfs(g):
    assert diameter(g) == oracles.bfs_diameter(g.node_count, g.edges)


@settings(max_examples=40, deadline=None)
@given(digraphs())
def test_reachability_and_ancestors(g):
    reach = oracles.reach_sets(g.node_count, g.edges)
    for v in g.nodes:
        assert g.reachable_from(v) == reach[v]
        assert g.ancestors(v) == {w for w in g.nodes if v in reach[w]}


def test_dot_export():
    dot = Digraph(3, EXAMPLE_DAG).to_dot()
    assert dot.startswith("digraph G {")
    assert '"1" -> "2";' in dot and '"1" -> "3";' in dot and '"2" -> "3";' in dot
