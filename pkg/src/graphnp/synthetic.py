"""Synthetic graph generators for fixtures and oracle tasks.

The degree-rule task labels every edge ``(u, v)`` with
``(deg(u) + deg(v)) mod K`` and every node ``v`` with ``deg(v) mod K``, so
ground truth is recomputable from topology alone. It serves as an
independent oracle for end-to-end model checks. Node labels mirror the
molecule benchmarks, where node categories carry most of the signal about
incident edge categories.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .datasets import TuDataset
from .graphs import Edge, Graph, LabelAlphabet
from .seeding import rng as child_rng


def random_edge_set(n_nodes: int, edge_prob: float, rng: np.random.Generator):
    """Erdős–Rényi edge sample over ``n_nodes``, always at least one edge."""
    pairs = [(u, v) for u in range(n_nodes - 1) for v in range(u + 1, n_nodes)]
    mask = rng.random(len(pairs)) < edge_prob
    chosen = [p for p, keep in zip(pairs, mask) if keep]
    if not chosen:
        chosen = [pairs[int(rng.integers(len(pairs)))]]
    return chosen


def random_graph(n_nodes: int, edge_prob: float, seed: int,
                 node_classes: int = 1, edge_classes: Optional[int] = None) -> Graph:
    """Random graph with uniform random labels; used by property tests."""
    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = random_edge_set(n_nodes, edge_prob, rng)
    nodes = tuple(int(x) for x in rng.integers(node_classes, size=n_nodes))
    edges = tuple(
        Edge(u, v, int(rng.integers(edge_classes)) if edge_classes else None)
        for u, v in pairs)
    return Graph(nodes, edges, dataset_id=f"random/{seed}")


def degree_rule_graph(n_nodes: int, edge_prob: float, k: int,
                      rng: np.random.Generator,
                      dataset_id: str = "") -> Graph:
    """One graph following the degree-sum rule mod ``k``.

    Edge labels are ``(deg(u) + deg(v)) mod k``; node labels are
    ``deg(v) mod k``.
    """
    pairs = random_edge_set(n_nodes, edge_prob, rng)
    deg = np.zeros(n_nodes, dtype=np.int64)
    for u, v in pairs:
        deg[u] += 1
        deg[v] += 1
    nodes = tuple(int(d % k) for d in deg)
    edges = tuple(Edge(u, v, int((deg[u] + deg[v]) % k)) for u, v in pairs)
    return Graph(nodes, edges, dataset_id=dataset_id)


def degree_rule_dataset(n_graphs: int, k: int = 3, seed: int = 0,
                        n_min: int = 10, n_max: int = 20,
                        edge_prob: float = 0.2,
                        name: str = "degree-rule") -> TuDataset:
    """Family of degree-rule graphs with ``n_min``..``n_max`` nodes each."""
    graphs = []
    for i in range(n_graphs):
        rng = child_rng(seed, "degree-rule", i)
        n_nodes = int(rng.integers(n_min, n_max + 1))
        graphs.append(degree_rule_graph(n_nodes, edge_prob, k, rng,
                                        dataset_id=f"{name}/{i}"))
    alphabet = LabelAlphabet(edge_classes=k, node_classes=k)
    identity = {i: i for i in range(k)}
    return TuDataset(name, tuple(graphs), alphabet, dict(identity), identity)


def rule_label(g: Graph, edge_index: int, k: int) -> int:
    """Independent oracle: recompute the degree-rule label from topology."""
    e = g.edges[edge_index]
    return int((g.degrees[e.u] + g.degrees[e.v]) % k)


def rule_node_label(g: Graph, node: int, k: int) -> int:
    """Independent oracle for the node labeling rule."""
    return int(g.degrees[node] % k)
