import numpy as np
import pytest
from hypothesis import given, strategies as st

from graphnp.graphs import (Edge, Graph, LabelAlphabet,
                            adjacency_and_degree_matrices, degree,
                            infer_alphabet)


def test_edges_are_canonicalized_lower_index_first():
    g = Graph((0, 0, 0), (Edge(2, 0, 1), Edge(1, 0, 0)))
    assert [(e.u, e.v) for e in g.edges] == [(0, 1), (0, 2)]
    assert [e.label for e in g.edges] == [0, 1]


def test_canonicalization_is_idempotent(triangle):
    again = Graph(triangle.node_labels, triangle.edges,
                  triangle.global_attr, triangle.dataset_id)
    assert again.edges == triangle.edges
    assert again.node_labels == triangle.node_labels


def test_rejects_self_loop():
    with pytest.raises(ValueError, match="self-loop"):
        Graph((0, 0), (Edge(1, 1, 0),))


def test_rejects_duplicate_edge_even_when_reversed():
    with pytest.raises(ValueError, match="duplicate"):
        Graph((0, 0), (Edge(0, 1, 0), Edge(1, 0, 0)))


def test_rejects_out_of_range_endpoint():
    with pytest.raises(ValueError, match="outside"):
        Graph((0, 0), (Edge(0, 5, 0),))


def test_rejects_negative_labels():
    with pytest.raises(ValueError):
        Graph((0, -1), (Edge(0, 1, 0),))
    with pytest.raises(ValueError):
        Graph((0, 0), (Edge(0, 1, -2),))


def test_degrees_single_edge():
    g = Graph((0, 0), (Edge(0, 1, 0),))
    assert degree(g, 0) == 1 and degree(g, 1) == 1


def test_degrees_triangle(triangle):
    assert all(degree(triangle, i) == 2 for i in range(3))


def test_degrees_star_center():
    g = Graph((0,) * 5, tuple(Edge(0, i, 0) for i in range(1, 5)))
    assert degree(g, 0) == 4
    assert all(degree(g, i) == 1 for i in range(1, 5))


def test_degree_rejects_bad_index(triangle):
    with pytest.raises(IndexError):
        degree(triangle, 3)


def test_labeled_and_unlabeled_indices():
    # canonical edge order is (0,1), (0,2), (1,2)
    g = Graph((0, 0, 0), (Edge(0, 1, 1), Edge(1, 2, None), Edge(0, 2, 0)))
    assert g.labeled_edge_indices() == [0, 1]
    assert g.unlabeled_edge_indices() == [2]


def test_with_edge_labels_replaces_positionally(triangle):
    relabeled = triangle.with_edge_labels([None, 2, None])
    assert [(e.u, e.v) for e in relabeled.edges] == [(e.u, e.v) for e in triangle.edges]
    assert [e.label for e in relabeled.edges] == [None, 2, None]
    assert relabeled.node_labels == triangle.node_labels
    # original untouched
    assert [e.label for e in triangle.edges] == [0, 0, 1]


def test_with_edge_labels_length_mismatch(triangle):
    with pytest.raises(ValueError):
        triangle.with_edge_labels([0, 1])


def test_adjacency_full_edge_set_p2():
    g = Graph((0, 0), (Edge(0, 1, 0),))
    a, d = adjacency_and_degree_matrices(g, [0])
    assert np.array_equal(a, [[0, 1], [1, 0]])
    assert np.array_equal(d, np.diag([1.0, 1.0]))


def test_adjacency_subset_drops_endpoint_degrees(triangle):
    # remove edge (1,2): its endpoints lose one degree, node 0 keeps both
    subset = [i for i, e in enumerate(triangle.edges) if (e.u, e.v) != (1, 2)]
    a, d = adjacency_and_degree_matrices(triangle, subset)
    assert np.array_equal(np.diag(d), [2, 1, 1])
    assert a[1, 2] == 0 and a[0, 1] == 1 and a[0, 2] == 1


def test_adjacency_empty_subset(triangle):
    a, d = adjacency_and_degree_matrices(triangle, [])
    assert not a.any() and not d.any()


def test_adjacency_is_symmetric_zero_diagonal(triangle):
    a, _ = adjacency_and_degree_matrices(triangle, range(3))
    assert np.array_equal(a, a.T)
    assert not np.diag(a).any()


def test_adjacency_rejects_bad_edge_index(triangle):
    with pytest.raises(IndexError):
        adjacency_and_degree_matrices(triangle, [7])


def test_infer_alphabet_floors_edge_classes_at_two():
    g = Graph((0, 0), (Edge(0, 1, 0),))
    alphabet = infer_alphabet([g])
    assert alphabet.edge_classes == 2
    assert alphabet.node_classes == 1


def test_infer_alphabet_spans_all_graphs():
    g1 = Graph((0, 3), (Edge(0, 1, 1),))
    g2 = Graph((0, 0), (Edge(0, 1, 4),))
    alphabet = infer_alphabet([g1, g2])
    assert alphabet.edge_classes == 5
    assert alphabet.node_classes == 4


def test_alphabet_rejects_empty_classes():
    with pytest.raises(ValueError):
        LabelAlphabet(0, 1)
    with pytest.raises(ValueError):
        LabelAlphabet(2, 0)


@given(st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), max_size=20))
def test_construction_never_produces_unsorted_or_duplicate_edges(pairs):
    edges = []
    seen = set()
    for u, v in pairs:
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        edges.append(Edge(u, v, 0))
    g = Graph((0,) * 8, tuple(edges))
    assert all(e.u < e.v for e in g.edges)
    assert sorted((e.u, e.v) for e in g.edges) == [(e.u, e.v) for e in g.edges]
    assert int(g.degrees.sum()) == 2 * g.num_edges
