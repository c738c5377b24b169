"""Graph construction, generation, and serialization."""
import math

import numpy as np
import pytest

from gossiplab.errors import RetryExhausted
from gossiplab.graph import (
    DiGraph, connectivity_radius, directify, graph_from_text, graph_to_text,
    is_strongly_connected, laplacian, load_graph, random_geometric_graph,
    save_graph,
)

# 1 hears 2 and 3, 2 hears 3, 3 hears 1; strongly connected, asymmetric
TRIANGLE_EDGES = frozenset({(1, 2), (2, 3), (3, 1), (1, 3)})


def test_connectivity_radius_formula():
    assert connectivity_radius(16) == pytest.approx(math.sqrt(2 * math.log(16) / 16))
    with pytest.raises(ValueError):
        connectivity_radius(1)


def test_digraph_rejects_bad_edges():
    with pytest.raises(ValueError):
        DiGraph(3, {(1, 1)})
    with pytest.raises(ValueError):
        DiGraph(3, {(0, 2)})
    with pytest.raises(ValueError):
        DiGraph(3, {(1, 4)})
    with pytest.raises(ValueError):
        DiGraph(0, frozenset())


def test_digraph_rejects_bad_coords():
    with pytest.raises(ValueError):
        DiGraph(3, TRIANGLE_EDGES, coords=np.zeros((2, 2)))


def test_neighbor_and_degree_conventions():
    g = DiGraph(3, TRIANGLE_EDGES)
    # edge (i, j): i receives from j
    assert g.in_neighbors(1) == (2, 3)
    assert g.in_neighbors(2) == (3,)
    assert g.out_neighbors(3) == (1, 2)
    assert g.out_neighbors(2) == (1,)
    assert g.in_degree(1) == 2
    assert g.out_degree(1) == 1
    adj = g.adjacency()
    assert adj[0, 1] == 1.0 and adj[0, 2] == 1.0 and adj[1, 0] == 0.0
    assert adj.sum() == len(TRIANGLE_EDGES)


def test_symmetry_and_strong_connectivity():
    tri = DiGraph(3, TRIANGLE_EDGES)
    assert not tri.is_symmetric()
    assert is_strongly_connected(tri)
    k2 = DiGraph(2, {(1, 2), (2, 1)})
    assert k2.is_symmetric()
    assert is_strongly_connected(k2)
    assert not is_strongly_connected(DiGraph(2, {(1, 2)}))
    assert is_strongly_connected(DiGraph(1, frozenset()))


def test_graph_is_immutable(graph16):
    with pytest.raises(Exception):
        graph16.coords[0, 0] = 5.0
    with pytest.raises(Exception):
        graph16._adj[0, 0] = True
    assert isinstance(graph16.edges, frozenset)


def test_random_geometric_graph_properties(graph16):
    assert graph16.n == 16
    assert graph16.is_symmetric()
    assert is_strongly_connected(graph16)
    assert graph16.coords.shape == (16, 2)
    assert np.all(graph16.coords >= 0.0) and np.all(graph16.coords <= 1.0)
    r = connectivity_radius(16)
    for (i, j) in graph16.edges:
        d = np.linalg.norm(graph16.coords[i - 1] - graph16.coords[j - 1])
        assert d <= r + 1e-12


def test_random_geometric_graph_reproducible():
    a = random_geometric_graph(12, connectivity_radius(12), np.random.default_rng(5))
    b = random_geometric_graph(12, connectivity_radius(12), np.random.default_rng(5))
    assert a.edges == b.edges
    assert np.array_equal(a.coords, b.coords)


def test_random_geometric_graph_retry_budget():
    with pytest.raises(RetryExhausted) as info:
        random_geometric_graph(50, 0.01, np.random.default_rng(0), retries=3)
    assert info.value.attempts == 3


def test_random_geometric_graph_rejects_bad_args():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        random_geometric_graph(1, 0.5, rng)
    with pytest.raises(ValueError):
        random_geometric_graph(4, 0.0, rng)


def test_directify_zero_probability_is_identity(graph16):
    assert directify(graph16, 0.0, np.random.default_rng(3)) is graph16


def test_directify_output(graph16, digraph16):
    assert is_strongly_connected(digraph16)
    assert not digraph16.is_symmetric()
    # every kept edge existed; symmetric pairs only lost one direction
    assert digraph16.edges <= graph16.edges
    assert len(digraph16.edges) > len(graph16.edges) // 2
    assert np.array_equal(digraph16.coords, graph16.coords)
    again = directify(graph16, 0.3, np.random.default_rng(11))
    assert again.edges == digraph16.edges


def test_directify_rejects_bad_input():
    tri = DiGraph(3, TRIANGLE_EDGES)
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        directify(tri, 0.3, rng)           # asymmetric input
    k2 = DiGraph(2, {(1, 2), (2, 1)})
    with pytest.raises(ValueError):
        directify(k2, 1.0, rng)            # p_asym must be < 1
    with pytest.raises(ValueError):
        directify(k2, -0.1, rng)
    disconnected = DiGraph(3, {(1, 2), (2, 1)})
    with pytest.raises(ValueError):
        directify(disconnected, 0.3, rng)


def test_laplacian_row_sums_and_shape():
    a = np.array([[0.0, 0.5, 0.5], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    lap = laplacian(a)
    assert np.allclose(lap.sum(axis=1), 0.0)
    assert np.allclose(np.diag(lap), a.sum(axis=1))
    with pytest.raises(ValueError):
        laplacian(np.zeros((2, 3)))


def test_text_roundtrip(graph16):
    text = graph_to_text(graph16)
    back = graph_from_text(text)
    assert back.n == graph16.n
    assert back.edges == graph16.edges
    assert np.allclose(back.coords, graph16.coords)


def test_text_roundtrip_without_coords():
    g = DiGraph(3, TRIANGLE_EDGES)
    back = graph_from_text(graph_to_text(g))
    assert back.edges == g.edges
    assert back.coords is None


def test_reader_skips_comments_and_blank_lines():
    text = "# a header\n\n2 2\n1 2\n2 1\n# trailing note\n"
    g = graph_from_text(text)
    assert g.n == 2 and g.edges == {(1, 2), (2, 1)}


def test_reader_rejects_malformed_input():
    with pytest.raises(ValueError):
        graph_from_text("")
    with pytest.raises(ValueError):
        graph_from_text("2\n1 2\n")
    with pytest.raises(ValueError):
        graph_from_text("2 2\n1 2\n")          # edge count mismatch
    with pytest.raises(ValueError):
        graph_from_text("2 1\n1 2 3\n")
    with pytest.raises(ValueError):
        graph_from_text("2 1\n1 2\ncoord 1 0.5\n")
    with pytest.raises(ValueError):
        # coords must cover every node once
        graph_from_text("2 1\n1 2\ncoord 1 0.5 0.5\n")


def test_save_and_load_with_headers(tmp_path, graph16):
    path = tmp_path / "g.txt"
    save_graph(graph16, path, header_lines=["tool 1.0", "seed: 7"])
    text = path.read_text()
    assert text.startswith("# tool 1.0\n# seed: 7\n")
    back = load_graph(path)
    assert back.edges == graph16.edges
    assert np.allclose(back.coords, graph16.coords)
