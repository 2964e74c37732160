import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from condtest.fiber import (
    EnumerationCapError,
    SampleVector,
    build_fiber_graph,
    enumerate_fiber,
    fiber_cardinality,
    fiber_edge_count,
    is_bipartite,
    is_connected,
    two_coloring,
)


def test_sample_vector_statistics():
    y = SampleVector((0, 4, 2), 2)
    assert y.t == 6
    assert y.u == 4
    assert y.split == (2, 1)
    with pytest.raises(ValueError):
        SampleVector((1, -1), 1)
    with pytest.raises(ValueError):
        SampleVector((1, 2), 3)


def test_cardinality_known_values():
    assert fiber_cardinality(3, 6) == 28
    assert fiber_cardinality(1, 11) == 1
    assert fiber_cardinality(4, 5) == 56


def test_cardinality_matches_enumeration():
    for N in range(1, 6):
        for t in range(0, 11):
            assert fiber_cardinality(N, t) == sum(1 for _ in enumerate_fiber(N, t))


@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=9))
@settings(max_examples=40, deadline=None)
def test_cardinality_enumeration_property(N, t):
    vectors = [v.entries for v in enumerate_fiber(N, t)]
    assert len(vectors) == fiber_cardinality(N, t)
    assert len(set(vectors)) == len(vectors)
    assert all(sum(v) == t for v in vectors)


def test_enumeration_order():
    assert [v.entries for v in enumerate_fiber(2, 2)] == [(0, 2), (1, 1), (2, 0)]
    vecs = [v.entries for v in enumerate_fiber(3, 6)]
    assert len(vecs) == 28
    assert vecs == sorted(vecs)
    assert sum(1 for _ in enumerate_fiber(3, 2)) == 6


def test_enumeration_cap():
    with pytest.raises(EnumerationCapError):
        list(enumerate_fiber(10, 30, cap=100))


def test_edge_count_known_values():
    assert fiber_edge_count(3, 6) == 42
    assert fiber_edge_count(2, 5) == len(build_fiber_graph(2, 5).edges) == 5
    assert fiber_edge_count(4, 4) == len(build_fiber_graph(4, 4).edges)


def test_edge_count_formula_matches_graph_everywhere():
    for N in range(2, 5):
        for t in range(1, 9):
            graph = build_fiber_graph(N, t)
            assert fiber_edge_count(N, t) == len(graph.edges), (N, t)


def test_build_graph_small_cases():
    g = build_fiber_graph(3, 6)
    assert len(g.vertices) == 28
    assert len(g.edges) == 42
    g1 = build_fiber_graph(1, 4)
    assert len(g1.vertices) == 1
    assert len(g1.edges) == 0
    g2 = build_fiber_graph(2, 3)
    assert len(g2.vertices) == 4
    assert len(g2.edges) == 3  # a path


def test_edges_differ_by_one_move():
    g = build_fiber_graph(3, 5)
    moves = {m.deltas for m in g.basis_used.moves}
    for a, b in g.edges:
        diff = tuple(
            x - y for x, y in zip(g.vertices[a].entries, g.vertices[b].entries)
        )
        neg = tuple(-d for d in diff)
        assert diff in moves or neg in moves
    assert len(set(g.edges)) == len(g.edges)
    assert all(a != b for a, b in g.edges)


def test_connectivity_and_bipartiteness():
    g = build_fiber_graph(3, 6)
    assert is_connected(g)
    assert is_bipartite(g)
    single = build_fiber_graph(1, 4)
    assert is_connected(single)
    assert is_bipartite(single)
    for N in range(2, 5):
        for t in range(1, 9):
            graph = build_fiber_graph(N, t)
            assert is_connected(graph), (N, t)
            assert is_bipartite(graph), (N, t)


def test_path_parity_matches_coloring():
    # On a bipartite graph, any breadth-first distance has the parity of
    # the endpoint colors' difference.
    from collections import deque

    g = build_fiber_graph(3, 5)
    colors = two_coloring(g)
    assert colors is not None
    adj = g.adjacency()
    dist = {0: 0}
    queue = deque([0])
    while queue:
        node = queue.popleft()
        for other in adj[node]:
            if other not in dist:
                dist[other] = dist[node] + 1
                queue.append(other)
    for node, d in dist.items():
        assert d % 2 == (colors[node] != colors[0])
