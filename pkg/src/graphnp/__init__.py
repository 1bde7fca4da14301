"""Edge-label imputation on families of graphs.

A conditional-distribution model (encoder over observed edges, mean
aggregation, per-edge decoder) plus five reference imputers, a benchmark
harness with weighted metrics and significance testing, and loaders for
the common plain-text graph benchmark layout.
"""

from .baselines import (CommonImputer, CommonNeighborImputer,
                        NeuralNetImputer, RandomForestImputer, RandomImputer)
from .datasets import (SplitSpec, TuDataset, load_tu_dataset, sparsify,
                       split, read_graph_dump, write_graph_dump,
                       write_tu_files)
from .errors import (ConfigError, DataFormatError, GraphnpError,
                     NumericalError)
from .evaluation import (ConfusionTally, EvalReport, ExperimentConfig,
                         run_experiment, two_tailed_t_test, weighted_metrics)
from .features import FeatureConfig, build_edge_features, feature_widths
from .graphs import Edge, Graph, LabelAlphabet, infer_alphabet
from .model import EdgePosterior, GraphNeuralProcess
from .spectral import EigenSystem, normalized_laplacian, symmetric_eigen
from .synthetic import degree_rule_dataset, degree_rule_graph, random_graph

__version__ = "0.1.0"

__all__ = [
    "CommonImputer", "CommonNeighborImputer", "ConfigError", "ConfusionTally",
    "DataFormatError", "Edge", "EdgePosterior", "EigenSystem", "EvalReport",
    "ExperimentConfig", "FeatureConfig", "Graph", "GraphNeuralProcess",
    "GraphnpError", "LabelAlphabet", "NeuralNetImputer", "NumericalError",
    "RandomForestImputer", "RandomImputer", "SplitSpec", "TuDataset",
    "build_edge_features", "degree_rule_dataset", "degree_rule_graph",
    "feature_widths", "infer_alphabet", "load_tu_dataset",
    "normalized_laplacian", "random_graph", "read_graph_dump",
    "run_experiment", "sparsify", "split", "symmetric_eigen",
    "two_tailed_t_test", "weighted_metrics", "write_graph_dump",
    "write_tu_files",
]
