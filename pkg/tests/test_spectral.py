import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from graphnp.graphs import adjacency_and_degree_matrices
from graphnp.spectral import (edge_eigenfeatures, normalized_laplacian,
                              symmetric_eigen)
from graphnp.synthetic import random_graph

RT2 = 1.0 / math.sqrt(2.0)


def laplacian_of(g, edge_subset=None):
    subset = range(g.num_edges) if edge_subset is None else edge_subset
    a, d = adjacency_and_degree_matrices(g, subset)
    return normalized_laplacian(a, d)


# ---- independent characteristic-polynomial root finders ------------------

def sym2_roots(a, b, d):
    half = 0.5 * (a + d)
    disc = math.sqrt(max(0.25 * (a - d) ** 2 + b * b, 0.0))
    return [half + disc, half - disc]


def sym3_roots(a, b, c, d, e, f):
    """Roots of the characteristic cubic, exact at integer degeneracies.

    For integer matrices the discriminant is an integer: zero means exact
    rational multiple roots (solved in Fraction arithmetic), nonzero means
    the root gaps are bounded away from zero and the trigonometric closed
    form is accurate.
    """
    a2 = -(a + d + f)
    a1 = (a * d - b * b) + (a * f - c * c) + (d * f - e * e)
    a0 = -(a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c))
    disc = (18 * a2 * a1 * a0 - 4 * a2 ** 3 * a0 + a2 ** 2 * a1 ** 2
            - 4 * a1 ** 3 - 27 * a0 ** 2)
    if disc == 0:
        d2 = a2 * a2 - 3 * a1
        if d2 == 0:
            return [float(Fraction(-a2, 3))] * 3
        r = Fraction(9 * a0 - a2 * a1, 2 * d2)
        s = -a2 - 2 * r
        return sorted([float(r), float(r), float(s)], reverse=True)
    shift = -a2 / 3.0
    pp = a1 - a2 * a2 / 3.0
    qq = 2.0 * a2 ** 3 / 27.0 - a2 * a1 / 3.0 + a0
    amp = 2.0 * math.sqrt(-pp / 3.0)
    arg = min(max(3.0 * qq / (amp * pp), -1.0), 1.0)
    phi = math.acos(arg) / 3.0
    return sorted((shift + amp * math.cos(phi - 2.0 * math.pi * k / 3.0)
                   for k in range(3)), reverse=True)


# ---- normalized Laplacian -------------------------------------------------

def test_p2_laplacian_entries(path3):
    lap = laplacian_of(path3, [0])
    assert lap[0, 0] == 1.0 and lap[1, 1] == 1.0
    assert lap[0, 1] == -1.0 and lap[1, 0] == -1.0
    # node 2 is isolated under this subset
    assert not lap[2].any() and not lap[:, 2].any()


def test_k3_laplacian_offdiagonals(triangle):
    lap = laplacian_of(triangle)
    assert np.allclose(np.diag(lap), 1.0)
    off = lap[~np.eye(3, dtype=bool)]
    assert np.allclose(off, -0.5)


def test_k3_eigenvalues(triangle):
    es = symmetric_eigen(laplacian_of(triangle))
    assert np.max(np.abs(es.values - [1.5, 1.5, 0.0])) < 1e-10


def test_laplacian_shape_validation():
    with pytest.raises(ValueError):
        normalized_laplacian(np.zeros((2, 3)), np.zeros((2, 3)))
    with pytest.raises(ValueError):
        normalized_laplacian(np.zeros((2, 2)), np.zeros((3, 3)))


# ---- eigensolver -----------------------------------------------------------

def test_identity_eigenvalues():
    es = symmetric_eigen(np.eye(3))
    assert np.array_equal(es.values, [1.0, 1.0, 1.0])


def test_diagonal_matrix_sorted_with_basis_vectors():
    es = symmetric_eigen(np.diag([3.0, 1.0, 2.0]))
    assert np.array_equal(es.values, [3.0, 2.0, 1.0])
    expected = np.eye(3)[:, [0, 2, 1]]
    assert np.allclose(np.abs(es.vectors), expected)


def test_2x2_hand_oracle():
    es = symmetric_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(es.values, [3.0, 1.0], atol=1e-12)
    assert np.allclose(es.vectors[:, 0], [RT2, RT2], atol=1e-12)
    assert np.allclose(es.vectors[:, 1], [RT2, -RT2], atol=1e-12)


def test_rejects_nonsymmetric():
    with pytest.raises(ValueError, match="symmetric"):
        symmetric_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_rejects_nonsquare():
    with pytest.raises(ValueError):
        symmetric_eigen(np.zeros((2, 3)))


def test_exhaustive_2x2_integer_matrices():
    worst = 0.0
    for a, b, d in itertools.product(range(-2, 3), repeat=3):
        es = symmetric_eigen(np.array([[a, b], [b, d]], dtype=float))
        worst = max(worst, float(np.max(np.abs(es.values - sym2_roots(a, b, d)))))
    assert worst < 1e-8


def test_exhaustive_3x3_integer_matrices():
    worst = 0.0
    for a, b, c, d, e, f in itertools.product(range(-2, 3), repeat=6):
        m = np.array([[a, b, c], [b, d, e], [c, e, f]], dtype=float)
        es = symmetric_eigen(m)
        worst = max(worst, float(np.max(np.abs(
            es.values - sym3_roots(a, b, c, d, e, f)))))
    assert worst < 1e-8


def test_random_laplacians_against_library_solver():
    for seed in range(40):
        g = random_graph(4 + seed % 12, 0.4, seed=seed)
        lap = laplacian_of(g)
        es = symmetric_eigen(lap)
        ref = np.sort(np.linalg.eigvalsh(lap))[::-1]
        assert np.max(np.abs(es.values - ref)) < 1e-9
        # columns orthonormal, reconstruction tight
        assert np.max(np.abs(es.vectors.T @ es.vectors - np.eye(es.size))) < 1e-9
        recon = es.vectors @ np.diag(es.values) @ es.vectors.T
        assert np.max(np.abs(recon - lap)) < 1e-7


def test_eigenpair_residuals_and_range():
    for seed in range(40):
        g = random_graph(5 + seed % 10, 0.3, seed=1000 + seed)
        lap = laplacian_of(g)
        es = symmetric_eigen(lap)
        assert es.values.min() > -1e-8 and es.values.max() < 2.0 + 1e-8
        residual = lap @ es.vectors - es.vectors * es.values[None, :]
        assert np.max(np.abs(residual)) < 1e-8


def test_zero_eigenvalue_multiplicity_covers_components():
    # each connected component with an edge contributes a zero eigenvalue
    for seed in range(15):
        g = random_graph(10, 0.15, seed=2000 + seed)
        parent = list(range(g.num_nodes))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in g.edges:
            parent[find(e.u)] = find(e.v)
        components = {find(e.u) for e in g.edges}
        es = symmetric_eigen(laplacian_of(g))
        near_zero = int(np.sum(np.abs(es.values) < 1e-6))
        assert near_zero >= len(components)


def test_sign_convention_first_large_entry_positive():
    for seed in range(10):
        g = random_graph(8, 0.4, seed=3000 + seed)
        es = symmetric_eigen(laplacian_of(g))
        for j in range(es.size):
            col = es.vectors[:, j]
            big = np.nonzero(np.abs(col) > 1e-12)[0]
            assert col[big[0]] > 0.0


def test_repeat_solve_is_bit_identical(triangle):
    lap = laplacian_of(triangle)
    a = symmetric_eigen(lap)
    b = symmetric_eigen(lap)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.vectors, b.vectors)


# ---- edge eigenfeatures ----------------------------------------------------

def test_p2_edge_feature():
    import graphnp.graphs as gg
    g = gg.Graph((0, 0), (gg.Edge(0, 1, 0),))
    es = symmetric_eigen(laplacian_of(g))
    feats = edge_eigenfeatures(es, 0, 1, m=1)
    assert np.allclose(feats, [RT2, -RT2], atol=1e-7)


def test_full_m_returns_both_rows(triangle):
    es = symmetric_eigen(laplacian_of(triangle))
    feats = edge_eigenfeatures(es, 0, 2, m=3)
    assert feats.shape == (6,)
    assert np.array_equal(feats[:3], es.vectors[0])
    assert np.array_equal(feats[3:], es.vectors[2])


def test_endpoint_swap_is_block_swap(triangle):
    es = symmetric_eigen(laplacian_of(triangle))
    uv = edge_eigenfeatures(es, 0, 1, m=2)
    vu = edge_eigenfeatures(es, 1, 0, m=2)
    assert np.array_equal(uv[:2], vu[2:])
    assert np.array_equal(uv[2:], vu[:2])


def test_m_out_of_range(triangle):
    es = symmetric_eigen(laplacian_of(triangle))
    with pytest.raises(ValueError):
        edge_eigenfeatures(es, 0, 1, m=4)
    with pytest.raises(ValueError):
        edge_eigenfeatures(es, 0, 1, m=0)


def test_node_out_of_range(triangle):
    es = symmetric_eigen(laplacian_of(triangle))
    with pytest.raises(IndexError):
        edge_eigenfeatures(es, 0, 3, m=1)
