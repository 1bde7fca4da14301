"""Command-line front end: inspect, train, benchmark, impute.

One flat key=value config file drives everything; command-line overrides
win over file values, and the effective configuration is echoed into each
run directory. Exit codes: 0 success, 1 usage or configuration problem,
2 malformed or missing data, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import List, Optional

from .datasets import load_tu_dataset, read_graph_dump
from .errors import ConfigError, DataFormatError, GraphnpError, NumericalError
from .evaluation import METHOD_NAMES, ExperimentConfig, run_experiment
from .model import GraphNeuralProcess
from .synthetic import degree_rule_dataset

DEFAULT_METHODS = "gnp,random,common,common_neighbor,forest,nn"


@dataclass
class RunConfig:
    """Everything a reproducible run needs, with library defaults."""

    dataset: str = "degree-rule"
    data_root: str = "data"
    m: int = 1
    r_width: int = 256
    p0: float = 0.4
    p1: float = 0.9
    epochs: int = 10
    runs: int = 5
    train_fraction: float = 0.8
    seed: int = 0
    learning_rate: float = 0.001
    n_trees: int = 100
    methods: str = DEFAULT_METHODS
    scoring: str = "targets_only"
    synthetic_graphs: int = 300
    synthetic_classes: int = 3
    synthetic_seed: int = 0

    def method_list(self) -> List[str]:
        names = [m.strip() for m in self.methods.split(",") if m.strip()]
        if not names:
            raise ConfigError("methods list is empty")
        return names

    def validate(self) -> "RunConfig":
        if self.m < 1:
            raise ConfigError(f"m must be >= 1, got {self.m}")
        if self.r_width < 1:
            raise ConfigError(f"r_width must be >= 1, got {self.r_width}")
        if not (0.0 < self.p0 <= self.p1 <= 1.0):
            raise ConfigError(
                f"need 0 < p0 <= p1 <= 1, got p0={self.p0}, p1={self.p1}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if not (0.0 < self.train_fraction < 1.0):
            raise ConfigError(
                f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if self.learning_rate <= 0:
            raise ConfigError(
                f"learning_rate must be > 0, got {self.learning_rate}")
        if self.n_trees < 1:
            raise ConfigError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.scoring not in ("targets_only", "all_edges"):
            raise ConfigError(
                f"unknown scoring mode: {self.scoring!r} "
                "(expected targets_only or all_edges)")
        if self.synthetic_graphs < 1:
            raise ConfigError("synthetic_graphs must be >= 1")
        if self.synthetic_classes < 2:
            raise ConfigError("synthetic_classes must be >= 2")
        for name in self.method_list():
            if name not in METHOD_NAMES:
                raise ConfigError(
                    f"unknown method: {name!r} "
                    f"(expected one of {', '.join(METHOD_NAMES)})")
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _parse_value(key: str, text: str):
    kind = _FIELD_TYPES.get(key)
    if kind is None:
        raise ConfigError(f"unknown config key: {key!r}")
    text = text.strip()
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        return text
    except ValueError:
        raise ConfigError(f"bad value for {key!r}: {text!r} (expected {kind})")


def parse_config_file(path) -> dict:
    """Flat key=value lines; # comments and blank lines are skipped."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    values = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(
                f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, text = line.partition("=")
        key = key.strip()
        values[key] = _parse_value(key, text)
    return values


def build_run_config(args) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(parse_config_file(args.config))
    for item in getattr(args, "overrides", None) or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, text = item.partition("=")
        values[key.strip()] = _parse_value(key.strip(), text)
    if getattr(args, "seed", None) is not None:
        values["seed"] = args.seed
    if getattr(args, "dataset", None):
        values["dataset"] = args.dataset
    if getattr(args, "data", None):
        values["data_root"] = args.data
    return replace(RunConfig(), **values).validate()


def load_dataset_for_config(cfg: RunConfig):
    """Built-in generator for the rule family, TU files for everything else."""
    if cfg.dataset == "degree-rule":
        return degree_rule_dataset(n_graphs=cfg.synthetic_graphs,
                                   k=cfg.synthetic_classes,
                                   seed=cfg.synthetic_seed)
    return load_tu_dataset(cfg.data_root, cfg.dataset)


def _config_echo(cfg: RunConfig) -> str:
    lines = [f"{f.name}={getattr(cfg, f.name)}" for f in fields(RunConfig)]
    return "\n".join(lines) + "\n"


def make_run_dir(base, dataset: str, seed: int) -> Path:
    """runs/<dataset>/<timestamp>-<seed>/, suffixed if it already exists."""
    stamp = time.strftime("%Y%m%dT%H%M%S")
    root = Path(base) / dataset
    root.mkdir(parents=True, exist_ok=True)
    candidate = root / f"{stamp}-{seed}"
    counter = 2
    while candidate.exists():
        candidate = root / f"{stamp}-{seed}-{counter}"
        counter += 1
    candidate.mkdir()
    return candidate


def cmd_inspect(args) -> int:
    cfg = build_run_config(args)
    ds = load_dataset_for_config(cfg)
    stats = ds.stats()
    print(f"dataset: {ds.name}")
    print(f"graphs: {stats['graphs']}")
    print(f"mean_nodes: {stats['mean_nodes']:.2f}")
    print(f"mean_edges: {stats['mean_edges']:.2f}")
    print(f"edge_classes: {stats['edge_classes']}")
    print(f"node_classes: {stats['node_classes']}")
    return 0


def cmd_train(args) -> int:
    cfg = build_run_config(args)
    ds = load_dataset_for_config(cfg)
    model = GraphNeuralProcess(
        m=cfg.m, r_width=cfg.r_width, p0=cfg.p0, p1=cfg.p1,
        epochs=cfg.epochs, learning_rate=cfg.learning_rate, seed=cfg.seed)
    model.fit(ds)
    run_dir = make_run_dir(args.out, ds.name, cfg.seed)
    (run_dir / "config.txt").write_text(_config_echo(cfg))
    model.save(run_dir / "checkpoint.json")
    trace_lines = ["epoch,loss"]
    trace_lines.extend(f"{i + 1},{loss!r}"
                       for i, loss in enumerate(model.loss_trace_))
    (run_dir / "loss_trace.csv").write_text("\n".join(trace_lines) + "\n")
    print(run_dir)
    return 0


def cmd_benchmark(args) -> int:
    cfg = build_run_config(args)
    ds = load_dataset_for_config(cfg)
    experiment = ExperimentConfig(
        m=cfg.m, r_width=cfg.r_width, p0=cfg.p0, p1=cfg.p1,
        epochs=cfg.epochs, learning_rate=cfg.learning_rate,
        train_fraction=cfg.train_fraction, n_trees=cfg.n_trees,
        scoring=cfg.scoring)
    report = run_experiment(ds, cfg.method_list(), cfg.runs, cfg.seed,
                            experiment)
    run_dir = make_run_dir(args.out, ds.name, cfg.seed)
    (run_dir / "config.txt").write_text(_config_echo(cfg))
    (run_dir / "report.json").write_text(report.to_json())
    (run_dir / "metrics.csv").write_text(report.to_csv())
    for result in report.methods:
        mean = result.mean("weighted_f1")
        sd = result.sd("weighted_f1")
        extra = ""
        if result.p_vs_gnp is not None:
            extra = f"  p_vs_gnp={result.p_vs_gnp:.4f}"
        print(f"{result.method:16s} F1 {mean:.4f} +/- {sd:.4f}{extra}")
    print(run_dir)
    return 0


def cmd_impute(args) -> int:
    model = GraphNeuralProcess.load(args.checkpoint)
    graphs = read_graph_dump(args.graphs)
    records = []
    for gi, g in enumerate(graphs):
        unknown = g.unlabeled_edge_indices()
        if not unknown:
            continue
        try:
            posterior = model.posterior(g)
        except ValueError as exc:
            raise DataFormatError(f"graph {gi}: {exc}")
        for i in unknown:
            edge = g.edges[i]
            probs = posterior.probs[i]
            records.append({
                "format_version": 1,
                "graph_index": gi,
                "dataset_id": g.dataset_id,
                "u": edge.u,
                "v": edge.v,
                "probabilities": [float(x) for x in probs],
                "label": int(posterior.point_labels[i]),
            })
    text = "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
    if args.out_file:
        Path(args.out_file).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exit code 1."""

    def error(self, message):
        raise ConfigError(message)


def _add_config_options(sub, with_out: bool = True):
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--set", dest="overrides", action="append",
                     metavar="KEY=VALUE",
                     help="override one config key (repeatable)")
    sub.add_argument("--seed", type=int, help="master seed override")
    sub.add_argument("--dataset", help="dataset name override")
    sub.add_argument("--data", help="dataset root directory override")
    sub.add_argument("--jobs", type=int, default=1,
                     help="worker cap (this build executes sequentially)")
    if with_out:
        sub.add_argument("--out", default="runs",
                         help="base directory for run outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graphnp",
                     description="Edge-label imputation on graph families")
    commands = parser.add_subparsers(dest="command", required=True)

    inspect = commands.add_parser(
        "inspect", help="print dataset statistics")
    inspect.add_argument("dataset_name", nargs="?",
                         help="dataset name (positional form)")
    _add_config_options(inspect, with_out=False)
    inspect.set_defaults(func=cmd_inspect)

    train = commands.add_parser(
        "train", help="train a model and write a checkpoint")
    _add_config_options(train)
    train.set_defaults(func=cmd_train)

    benchmark = commands.add_parser(
        "benchmark", help="run the multi-method comparison")
    _add_config_options(benchmark)
    benchmark.set_defaults(func=cmd_benchmark)

    impute = commands.add_parser(
        "impute", help="fill in unlabeled edges with a trained checkpoint")
    impute.add_argument("checkpoint", help="checkpoint file from train")
    impute.add_argument("graphs", help="graph dump file (one record per line)")
    impute.add_argument("--out", dest="out_file",
                        help="write records here instead of stdout")
    impute.add_argument("--seed", type=int, default=0,
                        help="accepted for interface parity; imputation "
                             "is deterministic")
    impute.set_defaults(func=cmd_impute)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "jobs", 1) is not None and getattr(args, "jobs", 1) < 1:
            raise ConfigError("--jobs must be >= 1")
        if getattr(args, "dataset_name", None) and not getattr(args, "dataset", None):
            args.dataset = args.dataset_name
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except GraphnpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
