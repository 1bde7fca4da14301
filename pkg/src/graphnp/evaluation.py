"""Weighted metrics, significance testing, and the multi-run benchmark driver.

Metric conventions, fixed so results are reproducible to the bit:

* Per-class precision ``TP/(TP+FP)`` and recall ``TP/(TP+FN)`` score 0 when
  their denominator is 0; F1 is the harmonic mean, 0 when both are 0.
* Weighted aggregates use true-class proportions as weights, accumulated in
  ascending class order.
* Weighted recall algebraically cancels to ``trace/total``; it is computed
  that way (exact integer trace, one float division), which makes the
  equality with classification accuracy exact rather than approximate.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from . import seeding
from .baselines import (CommonImputer, CommonNeighborImputer,
                        NeuralNetImputer, RandomForestImputer, RandomImputer)
from .datasets import SplitSpec, TuDataset, sparsify, split
from .errors import ConfigError
from .graphs import Graph
from .model import GraphNeuralProcess

REPORT_FORMAT_VERSION = 1
METRIC_NAMES = ("weighted_precision", "weighted_recall", "weighted_f1")
METHOD_NAMES = ("gnp", "random", "common", "common_neighbor", "forest", "nn")


class ConfusionTally:
    """K x K count matrix; rows are true classes, columns predictions."""

    def __init__(self, n_classes: int):
        if n_classes < 1:
            raise ValueError("tally needs at least one class")
        self.counts = np.zeros((n_classes, n_classes), dtype=np.int64)

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def add(self, true_label: int, predicted_label: int, count: int = 1):
        self.counts[true_label, predicted_label] += count

    def add_many(self, truths, predictions):
        truths = np.asarray(truths)
        predictions = np.asarray(predictions)
        if truths.shape != predictions.shape:
            raise ValueError("truth and prediction lengths differ")
        for t, p in zip(truths, predictions):
            self.counts[int(t), int(p)] += 1

    def accuracy(self) -> float:
        """Correct fraction: integer trace over integer total."""
        total = self.total
        if total == 0:
            raise ValueError("empty tally has no accuracy")
        return int(np.trace(self.counts)) / total


def weighted_metrics(tally: ConfusionTally):
    """(precision, recall, f1) weighted by true-class proportions.

    Plain scalar arithmetic in a fixed class order; see the module
    docstring for the exact conventions.
    """
    total = tally.total
    if total == 0:
        raise ValueError("cannot score an empty tally")
    counts = tally.counts
    k = tally.n_classes
    precision = 0.0
    f1 = 0.0
    trace = 0
    for c in range(k):
        tp = int(counts[c, c])
        support = int(counts[c, :].sum())
        predicted = int(counts[:, c].sum())
        trace += tp
        p_c = tp / predicted if predicted else 0.0
        r_c = tp / support if support else 0.0
        f_c = 2.0 * p_c * r_c / (p_c + r_c) if (p_c + r_c) else 0.0
        weight = support / total
        precision += weight * p_c
        f1 += weight * f_c
    recall = trace / total
    return precision, recall, f1


def two_tailed_t_test(samples_a: Sequence[float], samples_b: Sequence[float]):
    """Unequal-variance t-test: (t, p, significant at alpha = 0.05).

    Degrees of freedom follow the Welch-Satterthwaite approximation. Two
    zero-variance samples compare degenerately: equal means give p = 1,
    different means p = 0.
    """
    a = [float(x) for x in samples_a]
    b = [float(x) for x in samples_b]
    if len(a) < 2 or len(b) < 2:
        raise ValueError("need at least two samples per side")
    na, nb = len(a), len(b)
    mean_a, mean_b = sum(a) / na, sum(b) / nb
    var_a = sum((x - mean_a) ** 2 for x in a) / (na - 1)
    var_b = sum((x - mean_b) ** 2 for x in b) / (nb - 1)
    if var_a == 0.0 and var_b == 0.0:
        if mean_a == mean_b:
            return 0.0, 1.0, False
        t = math.inf if mean_a > mean_b else -math.inf
        return t, 0.0, True
    sa, sb = var_a / na, var_b / nb
    t = (mean_a - mean_b) / math.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (
        (sa * sa / (na - 1)) + (sb * sb / (nb - 1)))
    p = 2.0 * float(stats.t.cdf(-abs(t), df))
    return t, p, p < 0.05


@dataclass
class ExperimentConfig:
    """Knobs shared by every method in one benchmark run."""

    m: int = 1
    r_width: int = 256
    p0: float = 0.4
    p1: float = 0.9
    epochs: int = 10
    learning_rate: float = 0.001
    train_fraction: float = 0.8
    n_trees: int = 100
    node_label_mode: str = "onehot"
    degree_divisor: float = 10.0
    scoring: str = "targets_only"

    def __post_init__(self):
        if self.scoring not in ("targets_only", "all_edges"):
            raise ConfigError(
                f"unknown scoring mode: {self.scoring!r} "
                "(expected targets_only or all_edges)")


def build_method(name: str, seed: int, cfg: ExperimentConfig):
    """Construct one imputer by its canonical benchmark name."""
    if name == "gnp":
        return GraphNeuralProcess(
            m=cfg.m, r_width=cfg.r_width, p0=cfg.p0, p1=cfg.p1,
            epochs=cfg.epochs, learning_rate=cfg.learning_rate, seed=seed,
            node_label_mode=cfg.node_label_mode,
            degree_divisor=cfg.degree_divisor)
    if name == "random":
        return RandomImputer(seed=seed)
    if name == "common":
        return CommonImputer()
    if name == "common_neighbor":
        return CommonNeighborImputer()
    if name == "forest":
        return RandomForestImputer(
            n_trees=cfg.n_trees, seed=seed, m=cfg.m, p0=cfg.p0, p1=cfg.p1,
            node_label_mode=cfg.node_label_mode,
            degree_divisor=cfg.degree_divisor)
    if name == "nn":
        return NeuralNetImputer(
            seed=seed, epochs=cfg.epochs, learning_rate=cfg.learning_rate,
            r_width=cfg.r_width, m=cfg.m, p0=cfg.p0, p1=cfg.p1,
            node_label_mode=cfg.node_label_mode,
            degree_divisor=cfg.degree_divisor)
    raise ConfigError(f"unknown method: {name!r} "
                      f"(expected one of {', '.join(METHOD_NAMES)})")


@dataclass
class MethodResult:
    """Per-run metric samples for one method, plus significance vs gnp."""

    method: str
    samples: Dict[str, List[float]] = field(default_factory=dict)
    p_vs_gnp: Optional[float] = None
    significant_vs_gnp: Optional[bool] = None

    def mean(self, metric: str) -> float:
        vals = self.samples[metric]
        return sum(vals) / len(vals)

    def sd(self, metric: str) -> float:
        vals = self.samples[metric]
        if len(vals) < 2:
            return 0.0
        mu = sum(vals) / len(vals)
        return math.sqrt(sum((x - mu) ** 2 for x in vals) / (len(vals) - 1))


@dataclass
class EvalReport:
    """Benchmark outcome: every method's per-run metrics on one dataset."""

    dataset: str
    scoring: str
    runs: int
    master_seed: int
    methods: List[MethodResult]

    def result(self, method: str) -> MethodResult:
        for r in self.methods:
            if r.method == method:
                return r
        raise KeyError(f"no result for method {method!r}")

    def to_dict(self) -> dict:
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "dataset": self.dataset,
            "scoring": self.scoring,
            "runs": self.runs,
            "master_seed": self.master_seed,
            "methods": [
                {
                    "method": r.method,
                    "samples": r.samples,
                    "mean": {m: r.mean(m) for m in METRIC_NAMES},
                    "sd": {m: r.sd(m) for m in METRIC_NAMES},
                    "p_vs_gnp": r.p_vs_gnp,
                    "significant_vs_gnp": r.significant_vs_gnp,
                }
                for r in self.methods
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(
            ["dataset", "method", "metric", "mean", "sd", "n", "p_vs_gnp"])
        for r in self.methods:
            p_txt = "" if r.p_vs_gnp is None else repr(r.p_vs_gnp)
            for metric in METRIC_NAMES:
                writer.writerow([
                    self.dataset, r.method, metric,
                    repr(r.mean(metric)), repr(r.sd(metric)),
                    len(r.samples[metric]), p_txt,
                ])
        return out.getvalue()


def _child_int(master_seed: int, *path) -> int:
    return int(seeding.child_sequence(master_seed, *path).generate_state(1)[0])


def score_run(methods: Dict[str, object], test_graphs: Sequence[Graph],
              n_classes: int, master_seed: int, run_index: int,
              cfg: ExperimentConfig) -> Dict[str, ConfusionTally]:
    """Impute every test graph once per method over a shared hiding pattern.

    Each test graph is sparsified once (same context for every method,
    fresh observed fraction ~ unif(p0, p1)); methods then fill in the
    hidden labels and the tallies score them against the truth.
    """
    tallies = {name: ConfusionTally(n_classes) for name in methods}
    for j, g in enumerate(test_graphs):
        if not g.edges:
            continue
        p_rng = seeding.rng(master_seed, "eval-p", run_index, j)
        fraction = float(p_rng.uniform(cfg.p0, cfg.p1))
        hidden_graph = sparsify(
            g, fraction, _child_int(master_seed, "sparsify", run_index, j))
        unknown = hidden_graph.unlabeled_edge_indices()
        context = hidden_graph.labeled_edge_indices()
        truths = [g.edges[i].label for i in unknown]
        context_truths = [g.edges[i].label for i in context]
        for name, method in methods.items():
            tally = tallies[name]
            if unknown:
                predictions = method.predict(hidden_graph)
                tally.add_many(truths, predictions)
            if cfg.scoring == "all_edges":
                for t in context_truths:
                    tally.add(t, t)
    return tallies


def run_experiment(ds: TuDataset, method_names: Sequence[str], runs: int,
                   master_seed: int, cfg: Optional[ExperimentConfig] = None
                   ) -> EvalReport:
    """Split, fit, impute, and score every method over seeded runs.

    Per run: a fresh train/test split of the graph family, every method
    fitted on the training side, every test graph sparsified once and
    imputed by all methods, weighted metrics computed per method. The
    report carries per-run samples and, when ``gnp`` participates with at
    least two runs, each method's two-tailed significance against it on
    weighted F1.
    """
    cfg = cfg or ExperimentConfig()
    if runs < 1:
        raise ConfigError("runs must be at least 1")
    method_names = list(method_names)
    for name in method_names:
        if name not in METHOD_NAMES:
            raise ConfigError(f"unknown method: {name!r} "
                              f"(expected one of {', '.join(METHOD_NAMES)})")
    results = {name: MethodResult(method=name,
                                  samples={m: [] for m in METRIC_NAMES})
               for name in method_names}
    for run_index in range(runs):
        split_seed = _child_int(master_seed, "split", run_index)
        train_ds, test_ds = split(
            ds, SplitSpec(train_fraction=cfg.train_fraction, seed=split_seed))
        fitted = {}
        for name in method_names:
            seed = _child_int(master_seed, "method", name, run_index)
            fitted[name] = build_method(name, seed, cfg).fit(train_ds)
        tallies = score_run(fitted, test_ds.graphs, ds.alphabet.edge_classes,
                            master_seed, run_index, cfg)
        for name in method_names:
            precision, recall, f1 = weighted_metrics(tallies[name])
            assert recall == tallies[name].accuracy()
            results[name].samples["weighted_precision"].append(precision)
            results[name].samples["weighted_recall"].append(recall)
            results[name].samples["weighted_f1"].append(f1)
    if "gnp" in results and runs >= 2:
        gnp_f1 = results["gnp"].samples["weighted_f1"]
        for name, result in results.items():
            if name == "gnp":
                continue
            t, p, significant = two_tailed_t_test(
                result.samples["weighted_f1"], gnp_f1)
            result.p_vs_gnp = p
            result.significant_vs_gnp = significant
    return EvalReport(dataset=ds.name, scoring=cfg.scoring, runs=runs,
                      master_seed=master_seed,
                      methods=[results[name] for name in method_names])
