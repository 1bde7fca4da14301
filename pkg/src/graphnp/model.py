"""The graph neural process: encoder, mean aggregation, conditional decoder.

Observed (context) edges are encoded row-wise and averaged into a fixed
vector ``r_C``; the decoder maps ``[r_C ; edge features]`` to a categorical
distribution over edge labels for every edge. Training follows the
per-graph loop: sample a context fraction, rebuild features from the
context subgraph, decode all edges, and take one optimizer step on the
cross-entropy against the true labels.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator

from . import seeding
from .datasets import coerce_graphs, round_half_up
from .errors import DataFormatError, NumericalError
from .features import FeatureConfig, edge_feature_pipeline, feature_widths
from .graphs import Graph, LabelAlphabet
from .neural import (AdamState, Mlp, adam_step, mlp_backward, mlp_from_records,
                     mlp_to_records, softmax, softmax_cross_entropy)

CHECKPOINT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class EdgePosterior:
    """Categorical label distribution for each edge of one graph.

    ``probs[i]`` is the distribution for canonical edge ``i``; rows sum to
    one. ``point_labels`` takes the argmax with lowest-class tie-break.
    """

    probs: np.ndarray

    @property
    def point_labels(self) -> np.ndarray:
        return np.argmax(self.probs, axis=1)


def encode_context(encoder: Mlp, context_rows: np.ndarray) -> np.ndarray:
    """Mean of the encoded context rows; invariant to row order."""
    context_rows = np.atleast_2d(context_rows)
    if context_rows.shape[0] == 0:
        raise ValueError("at least one context row is required")
    return encoder.forward(context_rows).mean(axis=0)


def decode_targets(decoder: Mlp, r_c: np.ndarray, rows: np.ndarray) -> EdgePosterior:
    """Per-edge softmax distributions from ``[r_C ; row]`` decoder inputs."""
    rows = np.atleast_2d(rows)
    tiled = np.repeat(r_c[None, :], rows.shape[0], axis=0)
    logits = decoder.forward(np.concatenate([tiled, rows], axis=1))
    return EdgePosterior(probs=softmax(logits))


class GraphNeuralProcess(BaseEstimator):
    """Edge-label imputer learning a conditional distribution per edge.

    Parameters mirror the training protocol: ``m`` eigenfeature width,
    ``r_width`` the context vector (and hidden layer) width, ``p0``/``p1``
    the context-fraction range, ``epochs`` passes over the training family,
    and ``seed`` the master seed all internal sampling derives from.
    """

    def __init__(self, m: int = 1, r_width: int = 256, p0: float = 0.4,
                 p1: float = 0.9, epochs: int = 10, learning_rate: float = 0.001,
                 seed: int = 0, node_label_mode: str = "onehot",
                 degree_divisor: float = 10.0, shuffle: bool = True):
        self.m = m
        self.r_width = r_width
        self.p0 = p0
        self.p1 = p1
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.seed = seed
        self.node_label_mode = node_label_mode
        self.degree_divisor = degree_divisor
        self.shuffle = shuffle

    # -- construction ------------------------------------------------------

    def _validate(self):
        if not (0.0 < self.p0 <= self.p1 <= 1.0):
            raise ValueError("need 0 < p0 <= p1 <= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.r_width < 1:
            raise ValueError("r_width must be >= 1")

    def _init_networks(self, alphabet: LabelAlphabet):
        self._validate()
        self.alphabet_ = alphabet
        self.feature_config_ = FeatureConfig(m=self.m,
                                             degree_divisor=self.degree_divisor,
                                             node_label_mode=self.node_label_mode)
        target_width, context_width = feature_widths(self.feature_config_, alphabet)
        r = self.r_width
        init_rng = seeding.rng(self.seed, "init")
        self.encoder_ = Mlp.init([context_width, r, r, r, r], init_rng)
        self.decoder_ = Mlp.init([r + target_width, r, r, r, alphabet.edge_classes],
                                 init_rng)
        self.adam_ = AdamState.for_params(
            self.encoder_.parameters() + self.decoder_.parameters(),
            alpha=self.learning_rate)
        self.loss_trace_ = []

    # -- training ----------------------------------------------------------

    def fit(self, graphs, alphabet: Optional[LabelAlphabet] = None):
        """Train on a family of labeled graphs.

        ``graphs`` is a sequence of :class:`Graph` or a :class:`TuDataset`
        (which supplies the alphabet). Returns ``self``.
        """
        graph_list, alphabet = coerce_graphs(graphs, alphabet)
        if not graph_list:
            raise ValueError("cannot fit on an empty graph family")
        self._init_networks(alphabet)
        params = self.encoder_.parameters() + self.decoder_.parameters()
        for epoch in range(self.epochs):
            order = np.arange(len(graph_list))
            if self.shuffle:
                order = seeding.rng(self.seed, "order", epoch).permutation(order)
            epoch_losses = []
            for gi in order:
                loss = self._train_step(graph_list[gi], epoch, int(gi), params)
                if loss is not None:
                    epoch_losses.append(loss)
            if not epoch_losses:
                raise ValueError("no trainable graphs (all have zero labeled edges)")
            self.loss_trace_.append(float(np.mean(epoch_losses)))
        return self

    def _train_step(self, g: Graph, epoch: int, graph_index: int,
                    params) -> Optional[float]:
        labeled = g.labeled_edge_indices()
        if not labeled:
            warnings.warn(f"skipping graph {g.dataset_id or graph_index}: "
                          "no labeled edges")
            return None
        rng = seeding.rng(self.seed, "ctx", epoch, graph_index)
        p = rng.uniform(self.p0, self.p1)
        n_cp = min(max(round_half_up(p * len(labeled)), 1), len(labeled))
        picked = rng.choice(len(labeled), size=n_cp, replace=False)
        context = sorted(labeled[i] for i in picked)

        f_cp, f_all = edge_feature_pipeline(g, context, self.feature_config_,
                                            self.alphabet_)
        enc_out, enc_cache = self.encoder_.forward(f_cp, want_cache=True)
        r_c = enc_out.mean(axis=0)
        dec_in = np.concatenate(
            [np.repeat(r_c[None, :], f_all.shape[0], axis=0), f_all], axis=1)
        logits, dec_cache = self.decoder_.forward(dec_in, want_cache=True)

        targets = np.array([g.edges[i].label for i in labeled], dtype=np.int64)
        losses, dlogits_rows = softmax_cross_entropy(logits[labeled], targets)
        loss = float(np.mean(losses))
        if not np.isfinite(loss):
            raise NumericalError(
                f"training loss diverged (epoch {epoch}, graph "
                f"{g.dataset_id or graph_index}, loss {loss})")

        dlogits = np.zeros_like(logits)
        dlogits[labeled] = dlogits_rows / len(labeled)
        dec_grads, ddec_in = mlp_backward(self.decoder_, dec_cache, dlogits)
        dr_c = ddec_in[:, :self.r_width].sum(axis=0)
        denc_out = np.repeat((dr_c / enc_out.shape[0])[None, :],
                             enc_out.shape[0], axis=0)
        enc_grads, _ = mlp_backward(self.encoder_, enc_cache, denc_out)
        adam_step(self.adam_, params, enc_grads + dec_grads)
        return loss

    # -- inference ---------------------------------------------------------

    def _check_fitted(self):
        if not hasattr(self, "encoder_"):
            raise ValueError("this model is not fitted yet")

    def posterior(self, g: Graph) -> EdgePosterior:
        """Label distribution for every edge, conditioned on labeled edges."""
        self._check_fitted()
        context = g.labeled_edge_indices()
        if not context:
            raise ValueError("imputation requires at least one labeled context edge")
        f_cp, f_all = edge_feature_pipeline(g, context, self.feature_config_,
                                            self.alphabet_)
        r_c = encode_context(self.encoder_, f_cp)
        return decode_targets(self.decoder_, r_c, f_all)

    def predict_proba(self, g: Graph) -> np.ndarray:
        """Posterior rows for the unlabeled edges, in canonical edge order."""
        self._check_fitted()
        unknown = g.unlabeled_edge_indices()
        if not unknown:
            return np.zeros((0, self.alphabet_.edge_classes))
        return self.posterior(g).probs[unknown]

    def predict(self, g: Graph) -> np.ndarray:
        """Point labels for the unlabeled edges (argmax, lowest-index ties)."""
        proba = self.predict_proba(g)
        if proba.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        return np.argmax(proba, axis=1)

    # -- persistence -------------------------------------------------------

    def to_checkpoint(self) -> dict:
        self._check_fitted()
        return {
            "format_version": CHECKPOINT_FORMAT_VERSION,
            "kind": "graph-neural-process",
            "alphabet": {"edge_classes": self.alphabet_.edge_classes,
                         "node_classes": self.alphabet_.node_classes},
            "feature_config": {"m": self.feature_config_.m,
                               "degree_divisor": self.feature_config_.degree_divisor,
                               "node_label_mode": self.feature_config_.node_label_mode},
            "params": self.get_params(),
            "loss_trace": [float(x) for x in self.loss_trace_],
            "encoder": mlp_to_records(self.encoder_),
            "decoder": mlp_to_records(self.decoder_),
        }

    def save(self, path) -> None:
        """Write a checkpoint that loads back bit-exactly."""
        payload = json.dumps(self.to_checkpoint(), sort_keys=True)
        Path(path).write_text(payload + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "GraphNeuralProcess":
        path = Path(path)
        if not path.is_file():
            raise DataFormatError(f"missing checkpoint: {path}")
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: invalid checkpoint JSON: {exc}") from None
        version = record.get("format_version")
        if version != CHECKPOINT_FORMAT_VERSION:
            raise DataFormatError(f"{path}: unsupported format_version {version!r}")
        if record.get("kind") != "graph-neural-process":
            raise DataFormatError(f"{path}: not a graph-neural-process checkpoint")
        model = cls(**record["params"])
        alphabet = LabelAlphabet(record["alphabet"]["edge_classes"],
                                 record["alphabet"]["node_classes"])
        model._init_networks(alphabet)
        model.encoder_ = mlp_from_records(record["encoder"])
        model.decoder_ = mlp_from_records(record["decoder"])
        model.loss_trace_ = list(record.get("loss_trace", []))
        expected_enc, expected_dec = model._expected_dims()
        if model.encoder_.dims != expected_enc or model.decoder_.dims != expected_dec:
            raise DataFormatError(f"{path}: layer shapes do not match the "
                                  "checkpoint header configuration")
        return model

    def _expected_dims(self):
        target_width, context_width = feature_widths(self.feature_config_,
                                                     self.alphabet_)
        r = self.r_width
        return ([context_width, r, r, r, r],
                [r + target_width, r, r, r, self.alphabet_.edge_classes])
