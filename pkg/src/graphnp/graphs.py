"""Core graph types: undirected labeled graphs and their matrix views.

A graph holds categorical node labels, a canonicalized list of undirected
edges (each unordered pair stored once as ``u < v``), and an optional
global attribute that is carried for format fidelity but never consumed.
Graphs are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np


@dataclass(frozen=True, order=True)
class Edge:
    """Undirected edge between node indices ``u`` and ``v``.

    ``label`` is a categorical integer, or ``None`` for an edge whose value
    is unknown and subject to imputation.
    """

    u: int
    v: int
    label: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class LabelAlphabet:
    """Cardinalities of the dense 0-based label alphabets of a dataset."""

    edge_classes: int
    node_classes: int

    def __post_init__(self):
        if self.edge_classes < 1 or self.node_classes < 1:
            raise ValueError("label alphabets must have at least one class")


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph with labeled nodes and edges.

    ``node_labels[i]`` is the categorical attribute of node ``i``; edges are
    canonicalized (``u < v``, sorted, no duplicates, no self-loops) on
    construction. ``global_attr`` is carried but unused by the model.
    ``dataset_id`` is an opaque identifier, e.g. ``"MUTAG/12"``.
    """

    node_labels: tuple
    edges: tuple
    global_attr: Optional[float] = None
    dataset_id: str = ""

    def __post_init__(self):
        n = len(self.node_labels)
        object.__setattr__(self, "node_labels", tuple(int(x) for x in self.node_labels))
        if any(x < 0 for x in self.node_labels):
            raise ValueError("node labels must be >= 0")
        canonical = []
        for e in self.edges:
            u, v, label = int(e.u), int(e.v), e.label
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references a node outside [0, {n})")
            if u == v:
                raise ValueError(f"self-loop at node {u} is not allowed")
            if u > v:
                u, v = v, u
            if label is not None:
                label = int(label)
                if label < 0:
                    raise ValueError("edge labels must be >= 0")
            canonical.append(Edge(u, v, label))
        canonical.sort(key=lambda e: (e.u, e.v))
        for a, b in zip(canonical, canonical[1:]):
            if (a.u, a.v) == (b.u, b.v):
                raise ValueError(f"duplicate edge ({a.u}, {a.v})")
        object.__setattr__(self, "edges", tuple(canonical))

    @property
    def num_nodes(self) -> int:
        return len(self.node_labels)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> np.ndarray:
        """Degree of every node over the full edge set."""
        d = np.zeros(self.num_nodes, dtype=np.int64)
        for e in self.edges:
            d[e.u] += 1
            d[e.v] += 1
        d.setflags(write=False)
        return d

    def labeled_edge_indices(self) -> list:
        return [i for i, e in enumerate(self.edges) if e.label is not None]

    def unlabeled_edge_indices(self) -> list:
        return [i for i, e in enumerate(self.edges) if e.label is None]

    def with_edge_labels(self, labels: Sequence[Optional[int]]) -> "Graph":
        """Copy of this graph with edge labels replaced positionally.

        ``labels`` aligns with the canonical edge order; ``None`` marks an
        edge as unknown. Topology and node labels are unchanged.
        """
        if len(labels) != self.num_edges:
            raise ValueError("label sequence length must equal the edge count")
        edges = tuple(Edge(e.u, e.v, lab) for e, lab in zip(self.edges, labels))
        return Graph(self.node_labels, edges, self.global_attr, self.dataset_id)


def degree(g: Graph, i: int) -> int:
    """Number of edges incident to node ``i``."""
    if not 0 <= i < g.num_nodes:
        raise IndexError(f"node index {i} out of range [0, {g.num_nodes})")
    return int(g.degrees[i])


def infer_alphabet(graphs) -> LabelAlphabet:
    """Smallest alphabet covering every label seen in ``graphs``.

    Edge classes are floored at 2 (a one-class imputation problem is
    degenerate); node classes at 1.
    """
    max_edge = 2
    max_node = 1
    for g in graphs:
        for e in g.edges:
            if e.label is not None:
                max_edge = max(max_edge, e.label + 1)
        if g.node_labels:
            max_node = max(max_node, max(g.node_labels) + 1)
    return LabelAlphabet(edge_classes=max_edge, node_classes=max_node)


def adjacency_and_degree_matrices(g: Graph, edge_subset: Iterable[int]):
    """Adjacency and degree matrices restricted to a subset of edges.

    Matrices are sized by the full node set of ``g``; only the edges whose
    canonical indices appear in ``edge_subset`` contribute. Returns dense
    ``(A, D)`` with ``A`` symmetric 0/1 and ``D`` diagonal row sums.
    """
    n = g.num_nodes
    a = np.zeros((n, n), dtype=np.float64)
    for idx in edge_subset:
        idx = int(idx)
        if not 0 <= idx < g.num_edges:
            raise IndexError(f"edge index {idx} out of range [0, {g.num_edges})")
        e = g.edges[idx]
        a[e.u, e.v] = 1.0
        a[e.v, e.u] = 1.0
    d = np.diag(a.sum(axis=1))
    return a, d
