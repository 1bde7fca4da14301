"""Shared fixtures: tiny hand-built graphs and one small trained model."""

import pytest

from graphnp.graphs import Edge, Graph
from graphnp.model import GraphNeuralProcess
from graphnp.synthetic import degree_rule_dataset


@pytest.fixture
def triangle():
    # K3, all degrees 2, edge labels 0/1/0, node labels 0/1/0
    return Graph((0, 1, 0), (Edge(0, 1, 0), Edge(1, 2, 1), Edge(0, 2, 0)))


@pytest.fixture
def path3():
    # P3: 0-1-2, degrees (1, 2, 1)
    return Graph((0, 0, 1), (Edge(0, 1, 1), Edge(1, 2, 0)))


@pytest.fixture(scope="session")
def rule_ds():
    return degree_rule_dataset(60, k=3, seed=7)


@pytest.fixture(scope="session")
def rule_model(rule_ds):
    # small but fully learns the degree rule; reused by several suites
    return GraphNeuralProcess(r_width=64, epochs=5, seed=1).fit(rule_ds)
