"""TU benchmark collection I/O, label sparsification, and dataset splits.

The TU plain-text convention: ``NAME_A.txt`` holds comma-separated
1-indexed global node-id pairs (one directed row per direction),
``NAME_graph_indicator.txt`` maps each node id to its graph id, and the
label files carry one integer per node/edge row. Node and edge labels are
remapped to dense 0-based alphabets at load time; the mapping is kept on
the returned dataset.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import DataFormatError
from .graphs import Edge, Graph, LabelAlphabet, infer_alphabet

DUMP_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TuDataset:
    """A named family of graphs over one shared label alphabet."""

    name: str
    graphs: tuple
    alphabet: LabelAlphabet
    node_label_map: dict
    edge_label_map: dict

    def __post_init__(self):
        if not self.graphs:
            raise ValueError("a dataset must contain at least one graph")

    def __len__(self) -> int:
        return len(self.graphs)

    def stats(self) -> dict:
        """Summary statistics: graph count, mean sizes, label cardinalities."""
        return {
            "graphs": len(self.graphs),
            "mean_nodes": float(np.mean([g.num_nodes for g in self.graphs])),
            "mean_edges": float(np.mean([g.num_edges for g in self.graphs])),
            "edge_classes": self.alphabet.edge_classes,
            "node_classes": self.alphabet.node_classes,
        }


@dataclass(frozen=True)
class SplitSpec:
    """Graph-level train/test split: fraction of graphs on the train side."""

    train_fraction: float
    seed: int

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _read_lines(path: Path) -> List[Tuple[int, str]]:
    """Non-blank lines of a text file as (1-based line number, content)."""
    if not path.is_file():
        raise DataFormatError(f"missing dataset file: {path}")
    out = []
    with open(path, "r", encoding="ascii", errors="replace", newline=None) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if line:
                out.append((lineno, line))
    return out


def _parse_int(path: Path, lineno: int, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise DataFormatError(f"{path}:{lineno}: expected an integer, got {text!r}") from None


def load_tu_dataset(root_path, name: str) -> TuDataset:
    """Parse the four TU files of ``name`` under ``root_path``.

    Duplicate directed rows for one undirected edge are merged; two
    directions carrying different labels are a load error, as are ragged
    file lengths and edges that cross graph boundaries.
    """
    root = Path(root_path) / name
    if not root.is_dir():
        root = Path(root_path)
    a_path = root / f"{name}_A.txt"
    ind_path = root / f"{name}_graph_indicator.txt"
    nl_path = root / f"{name}_node_labels.txt"
    el_path = root / f"{name}_edge_labels.txt"

    indicator = _read_lines(ind_path)
    node_label_rows = _read_lines(nl_path)
    a_rows = _read_lines(a_path)
    edge_label_rows = _read_lines(el_path)

    if len(node_label_rows) != len(indicator):
        raise DataFormatError(
            f"{nl_path}: {len(node_label_rows)} node label rows for "
            f"{len(indicator)} nodes in {ind_path.name}")
    if len(edge_label_rows) != len(a_rows):
        raise DataFormatError(
            f"{el_path}: {len(edge_label_rows)} edge label rows for "
            f"{len(a_rows)} adjacency rows in {a_path.name}")

    node_graph = [_parse_int(ind_path, ln, s) for ln, s in indicator]
    raw_node_labels = [_parse_int(nl_path, ln, s) for ln, s in node_label_rows]

    graph_ids = sorted(set(node_graph))
    graph_pos = {gid: i for i, gid in enumerate(graph_ids)}

    # Global 1-based node id -> (graph position, local 0-based index).
    local_index: Dict[int, Tuple[int, int]] = {}
    counts = [0] * len(graph_ids)
    for node_id, gid in enumerate(node_graph, start=1):
        pos = graph_pos[gid]
        local_index[node_id] = (pos, counts[pos])
        counts[pos] += 1

    per_graph_nodes: List[List[int]] = [[] for _ in graph_ids]
    for node_id, raw in enumerate(raw_node_labels, start=1):
        pos, _ = local_index[node_id]
        per_graph_nodes[pos].append(raw)

    # Merge directed rows into unordered pairs, checking label agreement.
    per_graph_edges: List[Dict[Tuple[int, int], int]] = [dict() for _ in graph_ids]
    for (lineno, line), (_, label_text) in zip(a_rows, edge_label_rows):
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise DataFormatError(f"{a_path}:{lineno}: expected 'u, v', got {line!r}")
        u = _parse_int(a_path, lineno, parts[0])
        v = _parse_int(a_path, lineno, parts[1])
        for node_id in (u, v):
            if node_id not in local_index:
                raise DataFormatError(f"{a_path}:{lineno}: node id {node_id} not in "
                                      f"{ind_path.name}")
        raw_label = _parse_int(el_path, lineno, label_text)
        (gu, lu), (gv, lv) = local_index[u], local_index[v]
        if gu != gv:
            raise DataFormatError(
                f"{a_path}:{lineno}: edge ({u}, {v}) joins different graphs")
        if lu == lv:
            raise DataFormatError(f"{a_path}:{lineno}: self-loop on node id {u}")
        key = (min(lu, lv), max(lu, lv))
        seen = per_graph_edges[gu].get(key)
        if seen is not None and seen != raw_label:
            raise DataFormatError(
                f"{a_path}:{lineno}: conflicting labels {seen} and {raw_label} "
                f"for the two directions of edge ({u}, {v})")
        per_graph_edges[gu][key] = raw_label

    node_label_map = {raw: i for i, raw in enumerate(sorted(set(raw_node_labels)))}
    all_edge_labels = sorted({lab for edges in per_graph_edges for lab in edges.values()})
    edge_label_map = {raw: i for i, raw in enumerate(all_edge_labels)}

    graphs = []
    for pos in range(len(graph_ids)):
        nodes = tuple(node_label_map[raw] for raw in per_graph_nodes[pos])
        edges = tuple(Edge(u, v, edge_label_map[raw])
                      for (u, v), raw in sorted(per_graph_edges[pos].items()))
        graphs.append(Graph(nodes, edges, dataset_id=f"{name}/{pos}"))

    alphabet = LabelAlphabet(edge_classes=max(len(edge_label_map), 1),
                             node_classes=max(len(node_label_map), 1))
    return TuDataset(name, tuple(graphs), alphabet,
                     dict(node_label_map), dict(edge_label_map))


def write_tu_files(ds: TuDataset, root_path) -> Path:
    """Write ``ds`` back out in TU format (both edge directions listed).

    Inverse of :func:`load_tu_dataset` for fully labeled datasets; used to
    build on-disk fixtures.
    """
    root = Path(root_path) / ds.name
    root.mkdir(parents=True, exist_ok=True)
    a_rows, ind_rows, nl_rows, el_rows = [], [], [], []
    offset = 0
    for gpos, g in enumerate(ds.graphs, start=1):
        for lab in g.node_labels:
            ind_rows.append(str(gpos))
            nl_rows.append(str(lab))
        for e in g.edges:
            if e.label is None:
                raise ValueError("write_tu_files requires fully labeled graphs")
            for a, b in ((e.u, e.v), (e.v, e.u)):
                a_rows.append(f"{offset + a + 1}, {offset + b + 1}")
                el_rows.append(str(e.label))
        offset += g.num_nodes
    for fname, rows in ((f"{ds.name}_A.txt", a_rows),
                        (f"{ds.name}_graph_indicator.txt", ind_rows),
                        (f"{ds.name}_node_labels.txt", nl_rows),
                        (f"{ds.name}_edge_labels.txt", el_rows)):
        (root / fname).write_text("\n".join(rows) + "\n", encoding="ascii")
    return root


def sparsify(g: Graph, fraction_known: float, seed: int) -> Graph:
    """Hide edge labels, keeping a ``fraction_known`` share observed.

    Topology is untouched; exactly ``round(fraction_known * |E|)`` edges
    (at least one, when the graph has edges) keep their labels and the rest
    become unknown. Deterministic per seed.
    """
    if not 0.0 < fraction_known <= 1.0:
        raise ValueError("fraction_known must lie in (0, 1]")
    m = g.num_edges
    if m == 0:
        return g
    n_keep = min(max(round_half_up(fraction_known * m), 1), m)
    rng = np.random.Generator(np.random.PCG64(seed))
    keep = set(rng.choice(m, size=n_keep, replace=False).tolist())
    labels = [e.label if i in keep else None for i, e in enumerate(g.edges)]
    return g.with_edge_labels(labels)


def coerce_graphs(graphs, alphabet=None):
    """Normalize a graph-family argument to ``(graph list, alphabet)``.

    Accepts a :class:`TuDataset` (which supplies its alphabet) or any
    sequence of graphs; a missing alphabet is inferred from the labels
    present.
    """
    if isinstance(graphs, TuDataset):
        if alphabet is None:
            alphabet = graphs.alphabet
        graph_list = list(graphs.graphs)
    else:
        graph_list = list(graphs)
    if alphabet is None:
        alphabet = infer_alphabet(graph_list)
    return graph_list, alphabet


def split(ds: TuDataset, spec: SplitSpec) -> Tuple[TuDataset, TuDataset]:
    """Disjoint graph-level partition of ``ds``, deterministic per seed.

    Both sides are guaranteed non-empty; datasets with fewer than two
    graphs cannot be split.
    """
    n = len(ds.graphs)
    if n < 2:
        raise ValueError(f"cannot split a dataset of {n} graph(s)")
    n_train = min(max(round_half_up(spec.train_fraction * n), 1), n - 1)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    order = rng.permutation(n)
    train_idx = sorted(order[:n_train].tolist())
    test_idx = sorted(order[n_train:].tolist())
    make = lambda idx: TuDataset(ds.name, tuple(ds.graphs[i] for i in idx),
                                 ds.alphabet, ds.node_label_map, ds.edge_label_map)
    return make(train_idx), make(test_idx)


def write_graph_dump(graphs: Sequence[Graph], path) -> None:
    """Dump graphs as line-delimited JSON records, one graph per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for g in graphs:
            record = {
                "format_version": DUMP_FORMAT_VERSION,
                "dataset_id": g.dataset_id,
                "global_attr": g.global_attr,
                "node_labels": list(g.node_labels),
                "edges": [[e.u, e.v, e.label] for e in g.edges],
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_graph_dump(path) -> List[Graph]:
    """Read a normalized graph dump written by :func:`write_graph_dump`."""
    path = Path(path)
    if not path.is_file():
        raise DataFormatError(f"missing graph dump: {path}")
    graphs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            version = record.get("format_version")
            if version != DUMP_FORMAT_VERSION:
                raise DataFormatError(
                    f"{path}:{lineno}: unsupported format_version {version!r}")
            try:
                edges = tuple(Edge(int(u), int(v), None if lab is None else int(lab))
                              for u, v, lab in record["edges"])
                graphs.append(Graph(tuple(record["node_labels"]), edges,
                                    record.get("global_attr"),
                                    record.get("dataset_id", "")))
            except (KeyError, TypeError, ValueError) as exc:
                raise DataFormatError(f"{path}:{lineno}: bad graph record: {exc}") from None
    return graphs
