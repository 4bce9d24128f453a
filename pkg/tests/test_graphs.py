import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fractalkit as fk
from helpers import brute_diameter_largest_component, random_graph_maybe_disconnected

INF = float("inf")


def test_bfs_path():
    assert fk.bfs_distances(fk.path(5), 0).tolist() == [0, 1, 2, 3, 4]


def test_bfs_complete_all_adjacent():
    assert fk.bfs_distances(fk.complete(4), 2).tolist() == [1, 1, 0, 1]


def test_bfs_disconnected_sentinel():
    g = fk.Graph.from_edges(4, [(0, 1), (2, 3)])
    assert fk.bfs_distances(g, 0).tolist() == [0, 1, fk.UNREACHABLE, fk.UNREACHABLE]


def test_bfs_source_out_of_range():
    with pytest.raises(ValueError):
        fk.bfs_distances(fk.path(3), 3)


def test_bfs_max_depth_truncation():
    d = fk.bfs_distances(fk.path(6), 0, max_depth=2)
    assert d.tolist() == [0, 1, 2, -1, -1, -1]
    assert fk.ball(fk.path(6), 0, 2).tolist() == [0, 1, 2]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_bfs_symmetry_random(seed):
    g = random_graph_maybe_disconnected(random.Random(seed), 2, 24)
    mat = np.array([fk.bfs_distances(g, v) for v in range(g.n_vertices)])
    assert np.array_equal(mat, mat.T)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_diameter_matches_floyd_warshall(seed):
    g = random_graph_maybe_disconnected(random.Random(seed), 2, 48)
    diam, flag = fk.diameter(g)
    assert diam == brute_diameter_largest_component(g)
    assert flag == (fk.components(g).component_count > 1)


def test_diameter_examples():
    assert fk.diameter(fk.path(11)) == (10, False)
    assert fk.diameter(fk.complete(6)) == (1, False)
    assert fk.diameter(fk.disjoint_union(fk.path(11), fk.path(3))) == (10, True)
    assert fk.diameter(fk.path(1)) == (0, False)


def test_diameter_empty_graph():
    with pytest.raises(ValueError):
        fk.diameter(fk.Graph.from_edges(0, []))


def test_diameter_grid_known():
    assert fk.diameter(fk.grid(33, 33)) == (64, False)


def test_disjoint_union_examples():
    u = fk.disjoint_union(fk.path(3), fk.path(2))
    assert (u.n_vertices, u.edge_count) == (5, 3)
    assert fk.components(u).component_count == 2

    ident = fk.disjoint_union(fk.Graph.from_edges(0, []), fk.path(4))
    assert fk.to_canonical_dict(ident) == fk.to_canonical_dict(fk.path(4))

    c = fk.disjoint_union(fk.cycle(3), fk.cycle(3))
    assert (c.n_vertices, c.edge_count) == (6, 6)


def test_disjoint_union_degree_multiset():
    g1, g2 = fk.grid(3, 2), fk.balanced_tree(2, 2)
    u = fk.disjoint_union(g1, g2)
    assert sorted(u.degrees.tolist()) == sorted(
        g1.degrees.tolist() + g2.degrees.tolist()
    )


def test_components_examples():
    assert fk.components(fk.path(4)).component_count == 1
    iso = fk.Graph.from_edges(3, [])
    assert fk.components(iso).component_count == 3
    mixed = fk.disjoint_union(fk.path(3), fk.cycle(4))
    info = fk.components(mixed)
    assert info.component_count == 2
    assert info.largest_component_vertices.tolist() == [3, 4, 5, 6]


def test_components_ids_first_seen_and_tie_break():
    # two components of equal size: the one containing vertex 0 wins
    g = fk.disjoint_union(fk.path(3), fk.path(3))
    info = fk.components(g)
    assert info.labels.tolist() == [0, 0, 0, 1, 1, 1]
    assert info.largest_component_vertices.tolist() == [0, 1, 2]


def test_graph_validation():
    with pytest.raises(ValueError):
        fk.Graph.from_edges(3, [(0, 0)])
    with pytest.raises(ValueError):
        fk.Graph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        fk.Graph.from_edges(3, [(0, 3)])


def test_neighbors_sorted():
    g = fk.Graph.from_edges(5, [(4, 0), (2, 0), (0, 1)])
    assert g.neighbors(0).tolist() == [1, 2, 4]


def test_canonical_json_roundtrip():
    g = fk.grid(4, 3)
    text = fk.graph_to_json(g)
    obj = json.loads(text)
    assert obj["n"] == 12
    edges = obj["edges"]
    assert all(u < v for u, v in edges)
    assert edges == sorted(edges)
    back = fk.graph_from_json(text)
    assert fk.to_canonical_dict(back) == fk.to_canonical_dict(g)


def test_canonical_json_rejects_bad_payload():
    with pytest.raises(ValueError):
        fk.graph_from_json('{"edges": []}')
    with pytest.raises(ValueError):
        fk.graph_from_json('{"n": 2, "edges": [[0, 0]]}')


def test_induced_subgraph_relabels():
    g = fk.path(5)
    sub = fk.induced_subgraph(g, np.array([1, 2, 4]))
    assert sub.n_vertices == 3
    assert sub.edges_array().tolist() == [[0, 1]]
