"""Per-edge feature vectors for the encoder, decoder, and baselines.

Each edge is described by the local structural eigenfeatures of the
context-subgraph Laplacian plus the endpoint tuple (node attributes and
full-graph degrees). Context rows additionally carry the observed edge
label one-hot; target rows never contain label information.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from .graphs import Graph, LabelAlphabet, adjacency_and_degree_matrices
from .spectral import EigenSystem, edge_eigenfeatures, normalized_laplacian, symmetric_eigen


@dataclass(frozen=True)
class FeatureConfig:
    """Feature layout knobs.

    ``m`` is the eigenfeature neighborhood width (entries per endpoint
    row), ``degree_divisor`` scales raw degrees to keep inputs O(1), and
    ``node_label_mode`` selects one-hot (default) or raw integer node
    attributes.
    """

    m: int = 1
    degree_divisor: float = 10.0
    node_label_mode: str = "onehot"

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.degree_divisor <= 0:
            raise ValueError("degree_divisor must be positive")
        if self.node_label_mode not in ("onehot", "raw"):
            raise ValueError("node_label_mode must be 'onehot' or 'raw'")


def feature_widths(cfg: FeatureConfig, alphabet: LabelAlphabet) -> Tuple[int, int]:
    """(target row width, context row width) for one dataset configuration."""
    node_part = 2 * alphabet.node_classes if cfg.node_label_mode == "onehot" else 2
    target = 2 * cfg.m + node_part + 2
    return target, target + alphabet.edge_classes


def _node_block(label: int, cfg: FeatureConfig, alphabet: LabelAlphabet) -> np.ndarray:
    if cfg.node_label_mode == "raw":
        return np.array([float(label)])
    block = np.zeros(alphabet.node_classes)
    block[label] = 1.0
    return block


def build_edge_features(g: Graph, context_edges: Iterable[int], es: EigenSystem,
                        cfg: FeatureConfig, alphabet: LabelAlphabet):
    """Feature rows for every edge of ``g`` in canonical edge order.

    ``es`` must be the eigensystem of the context-subgraph Laplacian of
    ``g`` (full node set). Returns ``(F_cp, F)``: context rows with the
    observed label appended one-hot, and label-free rows for all edges.
    Degrees come from the full graph, scaled by the configured divisor.
    """
    if es.size != g.num_nodes:
        raise ValueError(
            f"eigensystem of size {es.size} does not match graph with "
            f"{g.num_nodes} nodes")
    context = sorted(int(i) for i in set(context_edges))
    for idx in context:
        if not 0 <= idx < g.num_edges:
            raise IndexError(f"context edge index {idx} out of range")
    target_width, context_width = feature_widths(cfg, alphabet)
    degrees = g.degrees / cfg.degree_divisor

    rows = np.empty((g.num_edges, target_width))
    for k, e in enumerate(g.edges):
        rows[k] = np.concatenate([
            edge_eigenfeatures(es, e.u, e.v, cfg.m),
            _node_block(g.node_labels[e.u], cfg, alphabet),
            _node_block(g.node_labels[e.v], cfg, alphabet),
            [degrees[e.u], degrees[e.v]],
        ])

    context_rows = np.zeros((len(context), context_width))
    for row, idx in enumerate(context):
        label = g.edges[idx].label
        if label is None:
            raise ValueError(f"context edge {idx} has no observed label")
        if label >= alphabet.edge_classes:
            raise ValueError(f"edge label {label} outside alphabet")
        context_rows[row, :target_width] = rows[idx]
        context_rows[row, target_width + label] = 1.0
    return context_rows, rows


def edge_feature_pipeline(g: Graph, context_edges: Iterable[int],
                          cfg: FeatureConfig, alphabet: LabelAlphabet):
    """Context Laplacian, eigensystem, and feature rows in one shot.

    Builds the adjacency restricted to ``context_edges``, its normalized
    Laplacian and eigendecomposition, then delegates to
    :func:`build_edge_features`.
    """
    context = sorted(int(i) for i in set(context_edges))
    a, d = adjacency_and_degree_matrices(g, context)
    es = symmetric_eigen(normalized_laplacian(a, d))
    return build_edge_features(g, context, es, cfg, alphabet)
