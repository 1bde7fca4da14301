"""Reference edge-label imputers the neural model is benchmarked against.

All five follow one interface: ``fit`` on a family of labeled graphs,
``impute`` (alias ``predict``) point labels for the unlabeled edges of a
query graph, in canonical edge order, never reading held-out labels.
Determinism is per seed: the same fitted imputer gives the same answer for
the same query graph regardless of call order.
"""

from __future__ import annotations

import zlib
from collections import Counter
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.ensemble import RandomForestClassifier

from . import seeding
from .datasets import coerce_graphs, round_half_up
from .features import FeatureConfig, edge_feature_pipeline, feature_widths
from .graphs import Graph, LabelAlphabet


def _graph_fingerprint(g: Graph) -> int:
    """Stable digest of topology plus which edge labels are visible."""
    parts = [str(g.num_nodes)]
    parts.extend(f"{e.u},{e.v},{'?' if e.label is None else e.label}"
                 for e in g.edges)
    return zlib.crc32("|".join(parts).encode("utf-8"))


def _modal(labels) -> Optional[int]:
    """Most frequent value; ties break to the lowest. None when empty."""
    counts = Counter(labels)
    if not counts:
        return None
    return max(counts.items(), key=lambda kv: (kv[1], -kv[0]))[0]


def _sample_context(rng: np.random.Generator, n_labeled: int,
                    p0: float, p1: float):
    """Indices into the labeled set: fraction ~ unif(p0, p1), at least 1."""
    p = rng.uniform(p0, p1)
    n_cp = min(max(round_half_up(p * n_labeled), 1), n_labeled)
    return sorted(int(i) for i in rng.choice(n_labeled, size=n_cp, replace=False))


class EdgeImputer(BaseEstimator):
    """Common surface for the reference methods."""

    def impute(self, g: Graph) -> np.ndarray:
        raise NotImplementedError

    def predict(self, g: Graph) -> np.ndarray:
        return self.impute(g)

    def _check_fitted(self):
        if not hasattr(self, "alphabet_"):
            raise ValueError(
                f"{type(self).__name__} is not fitted; call fit first")


class RandomImputer(EdgeImputer):
    """Uniform-random labels, the floor any learned method must beat."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def fit(self, graphs, alphabet: Optional[LabelAlphabet] = None):
        _, self.alphabet_ = coerce_graphs(graphs, alphabet)
        return self

    def impute(self, g: Graph) -> np.ndarray:
        self._check_fitted()
        n_unknown = len(g.unlabeled_edge_indices())
        rng = seeding.rng(self.seed, "random-imputer", _graph_fingerprint(g))
        return rng.integers(self.alphabet_.edge_classes, size=n_unknown,
                            dtype=np.int64)


class CommonImputer(EdgeImputer):
    """The globally most common training label, for every unknown edge."""

    def fit(self, graphs, alphabet: Optional[LabelAlphabet] = None):
        graph_list, self.alphabet_ = coerce_graphs(graphs, alphabet)
        labels = [e.label for g in graph_list for e in g.edges
                  if e.label is not None]
        if not labels:
            raise ValueError("training family has no labeled edges")
        self.modal_label_ = _modal(labels)
        return self

    def impute(self, g: Graph) -> np.ndarray:
        self._check_fitted()
        n_unknown = len(g.unlabeled_edge_indices())
        return np.full(n_unknown, self.modal_label_, dtype=np.int64)


class CommonNeighborImputer(EdgeImputer):
    """Most common observed label among edges sharing an endpoint.

    An unknown edge (u, v) takes the modal label of the query graph's
    labeled edges incident to u or v. When no labeled edge touches either
    endpoint it falls back to the graph's observed modal label, and then to
    the global training modal label, so every query gets an answer.
    """

    def fit(self, graphs, alphabet: Optional[LabelAlphabet] = None):
        graph_list, self.alphabet_ = coerce_graphs(graphs, alphabet)
        labels = [e.label for g in graph_list for e in g.edges
                  if e.label is not None]
        if not labels:
            raise ValueError("training family has no labeled edges")
        self.modal_label_ = _modal(labels)
        return self

    def impute(self, g: Graph) -> np.ndarray:
        self._check_fitted()
        context = [e for e in g.edges if e.label is not None]
        graph_modal = _modal([e.label for e in context])
        out = []
        for i in g.unlabeled_edge_indices():
            edge = g.edges[i]
            ends = (edge.u, edge.v)
            incident = [c.label for c in context
                        if c.u in ends or c.v in ends]
            label = _modal(incident)
            if label is None:
                label = graph_modal
            if label is None:
                label = self.modal_label_
            out.append(label)
        return np.array(out, dtype=np.int64)


class RandomForestImputer(EdgeImputer):
    """Bagged decision trees on the per-edge feature rows.

    Rows are the same label-free edge features the neural model decodes
    (spectral entries from an observed-edge subset, endpoint label one-hots,
    scaled degrees). Each training graph contributes its edges once, with
    the observed subset drawn at the same rate the neural model trains
    under; at impute time the observed subset is the query graph's labeled
    edges.
    """

    def __init__(self, n_trees: int = 100, seed: int = 0, m: int = 1,
                 p0: float = 0.4, p1: float = 0.9,
                 node_label_mode: str = "onehot",
                 degree_divisor: float = 10.0):
        self.n_trees = n_trees
        self.seed = seed
        self.m = m
        self.p0 = p0
        self.p1 = p1
        self.node_label_mode = node_label_mode
        self.degree_divisor = degree_divisor

    def _config(self) -> FeatureConfig:
        return FeatureConfig(m=self.m, degree_divisor=self.degree_divisor,
                             node_label_mode=self.node_label_mode)

    def fit(self, graphs, alphabet: Optional[LabelAlphabet] = None):
        graph_list, self.alphabet_ = coerce_graphs(graphs, alphabet)
        cfg = self._config()
        rows, labels = [], []
        for gi, g in enumerate(graph_list):
            labeled = g.labeled_edge_indices()
            if not labeled:
                continue
            rng = seeding.rng(self.seed, "ctx", gi)
            picked = _sample_context(rng, len(labeled), self.p0, self.p1)
            context = [labeled[i] for i in picked]
            _, feats = edge_feature_pipeline(g, context, cfg, self.alphabet_)
            for i in labeled:
                rows.append(feats[i])
                labels.append(g.edges[i].label)
        if not rows:
            raise ValueError("training family has no labeled edges")
        forest_seed = int(
            seeding.child_sequence(self.seed, "forest").generate_state(1)[0])
        self.forest_ = RandomForestClassifier(
            n_estimators=self.n_trees, random_state=forest_seed)
        self.forest_.fit(np.array(rows), np.array(labels))
        return self

    def impute(self, g: Graph) -> np.ndarray:
        self._check_fitted()
        unknown = g.unlabeled_edge_indices()
        if not unknown:
            return np.zeros(0, dtype=np.int64)
        context = g.labeled_edge_indices()
        if not context:
            raise ValueError(
                "imputation requires at least one labeled context edge")
        _, feats = edge_feature_pipeline(g, context, self._config(),
                                         self.alphabet_)
        return self.forest_.predict(feats[unknown]).astype(np.int64)


def mlp_parameter_count(dims) -> int:
    """Weights plus biases of a dense stack with the given layer sizes."""
    return sum(dims[i] * dims[i + 1] + dims[i + 1]
               for i in range(len(dims) - 1))


def gnp_parameter_count(alphabet: LabelAlphabet, cfg: FeatureConfig,
                        r_width: int) -> int:
    """Encoder plus decoder parameter total of the neural process."""
    target_w, context_w = feature_widths(cfg, alphabet)
    k = alphabet.edge_classes
    encoder = mlp_parameter_count(
        [context_w, r_width, r_width, r_width, r_width])
    decoder = mlp_parameter_count(
        [r_width + target_w, r_width, r_width, r_width, k])
    return encoder + decoder


def solve_hidden_width(target_params: int, in_width: int, k: int) -> int:
    """Hidden width whose 4-layer stack is nearest the target param count.

    For dims [in, h, h, h, k] the count is 2h^2 + h(in + k + 3) + k; the
    positive root is refined over its integer neighbors.
    """
    b = in_width + k + 3
    root = (-b + np.sqrt(b * b + 8.0 * max(target_params - k, 1))) / 4.0
    candidates = {max(1, int(np.floor(root)) + d) for d in (-1, 0, 1, 2)}
    return min(candidates, key=lambda h: abs(
        mlp_parameter_count([in_width, h, h, h, k]) - target_params))


class NeuralNetImputer(EdgeImputer):
    """Plain 4-layer net from edge features to label logits.

    Matched to the neural process in everything except the context pathway:
    same optimizer and epoch count, one update per graph per epoch over the
    same shuffled order, and a hidden width solved so the total parameter
    count is as close as possible to the paired encoder+decoder total
    (``r_width`` names the width being paired against).
    """

    def __init__(self, seed: int = 0, epochs: int = 10,
                 learning_rate: float = 0.001, r_width: int = 256,
                 m: int = 1, p0: float = 0.4, p1: float = 0.9,
                 node_label_mode: str = "onehot",
                 degree_divisor: float = 10.0, shuffle: bool = True):
        self.seed = seed
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.r_width = r_width
        self.m = m
        self.p0 = p0
        self.p1 = p1
        self.node_label_mode = node_label_mode
        self.degree_divisor = degree_divisor
        self.shuffle = shuffle

    def _config(self) -> FeatureConfig:
        return FeatureConfig(m=self.m, degree_divisor=self.degree_divisor,
                             node_label_mode=self.node_label_mode)

    def fit(self, graphs, alphabet: Optional[LabelAlphabet] = None):
        from .neural import AdamState, Mlp, adam_step, mlp_backward, \
            softmax_cross_entropy

        graph_list, self.alphabet_ = coerce_graphs(graphs, alphabet)
        if not graph_list:
            raise ValueError("cannot fit on an empty graph family")
        cfg = self._config()
        target_w, _ = feature_widths(cfg, self.alphabet_)
        k = self.alphabet_.edge_classes
        self.target_params_ = gnp_parameter_count(self.alphabet_, cfg,
                                                  self.r_width)
        self.hidden_width_ = solve_hidden_width(self.target_params_,
                                                target_w, k)
        h = self.hidden_width_
        dims = [target_w, h, h, h, k]
        self.num_params_ = mlp_parameter_count(dims)
        self.net_ = Mlp.init(dims, seeding.rng(self.seed, "init"))
        adam = AdamState.for_params(self.net_.parameters(),
                                    alpha=self.learning_rate)
        self.loss_trace_ = []
        for epoch in range(self.epochs):
            order = np.arange(len(graph_list))
            if self.shuffle:
                order = seeding.rng(self.seed, "order",
                                    epoch).permutation(order)
            epoch_losses = []
            for gi in order:
                g = graph_list[gi]
                labeled = g.labeled_edge_indices()
                if not labeled:
                    continue
                rng = seeding.rng(self.seed, "ctx", epoch, int(gi))
                picked = _sample_context(rng, len(labeled), self.p0, self.p1)
                context = [labeled[i] for i in picked]
                _, feats = edge_feature_pipeline(g, context, cfg,
                                                 self.alphabet_)
                rows = feats[labeled]
                targets = np.array([g.edges[i].label for i in labeled])
                logits, cache = self.net_.forward(rows, want_cache=True)
                losses, dlogits = softmax_cross_entropy(logits, targets)
                epoch_losses.append(float(np.mean(losses)))
                grads, _ = mlp_backward(self.net_, cache,
                                        dlogits / len(labeled))
                adam_step(adam, self.net_.parameters(), grads)
            if epoch_losses:
                self.loss_trace_.append(float(np.mean(epoch_losses)))
        return self

    def impute(self, g: Graph) -> np.ndarray:
        self._check_fitted()
        unknown = g.unlabeled_edge_indices()
        if not unknown:
            return np.zeros(0, dtype=np.int64)
        context = g.labeled_edge_indices()
        if not context:
            raise ValueError(
                "imputation requires at least one labeled context edge")
        _, feats = edge_feature_pipeline(g, context, self._config(),
                                         self.alphabet_)
        logits = self.net_.forward(feats[unknown])
        return np.argmax(logits, axis=1).astype(np.int64)
