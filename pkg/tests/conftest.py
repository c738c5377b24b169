"""Shared graph fixtures.

The three session graphs are frozen by seed and reused across test
modules; regenerating them is cheap but keeping one instance avoids
recomputing cached adjacency structures everywhere.
"""
import numpy as np
import pytest

from gossiplab.graph import (
    connectivity_radius, directify, random_geometric_graph,
)


@pytest.fixture(scope="session")
def graph16():
    """16-node connected geometric graph, bidirectional links."""
    rng = np.random.default_rng(7)
    return random_geometric_graph(16, connectivity_radius(16), rng)


@pytest.fixture(scope="session")
def digraph16(graph16):
    """Asymmetric variant of graph16, still strongly connected."""
    return directify(graph16, 0.3, np.random.default_rng(11))


@pytest.fixture(scope="session")
def graph50():
    """50-node connected geometric graph for the larger campaigns."""
    rng = np.random.default_rng(21)
    return random_geometric_graph(50, connectivity_radius(50), rng)
