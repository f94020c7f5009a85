import math
import random

import pytest

from navstruct.algorithms import (
    betweenness_centrality,
    compute_centrality,
    connected_components,
    degree_centrality,
    dijkstra_tree,
    eigenvector_centrality,
    katz_centrality,
    kruskal_edges,
    minimum_spanning_tree,
    shortest_path,
    spectral_radius,
)
from navstruct.errors import AlphaTooLarge, EmptyGraph, NoPath, ValidationError
from navstruct.fixtures import graph_from_edges, random_connected_graph
from navstruct.oracles import (
    betweenness_oracle,
    eigenvector_oracle,
    katz_oracle,
    mst_weight_exhaustive,
)


def unit(pairs):
    return [(i, j, 1.0) for i, j in pairs]


def line_graph(n):
    return graph_from_edges(
        [(float(k), 0.0, 0.0) for k in range(n)],
        unit([(k, k + 1) for k in range(n - 1)]),
    )


def kite_graph():
    """4 nodes, 5 weighted edges; the cheap route 0-1-2-3 costs 4."""
    return graph_from_edges(
        [(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0)],
        [(0, 1, 1.0), (0, 2, 4.0), (1, 2, 2.0), (1, 3, 5.0), (2, 3, 1.0)],
    )


# --- shortest paths ---------------------------------------------------------

def test_dijkstra_distances_on_kite():
    # distances frozen from an all-pairs relaxation done by hand:
    # 0-1 direct (1), 0-2 via 1 (3), 0-3 via 1,2 (4)
    g = kite_graph()
    dist, pred = dijkstra_tree(g, 0)
    assert dist == pytest.approx([0.0, 1.0, 3.0, 4.0])
    assert pred[3] == 2 and pred[2] == 1 and pred[1] == 0


def test_shortest_path_route_and_weight():
    g = kite_graph()
    path, weight = shortest_path(g, 0, 3)
    assert path == [0, 1, 2, 3]
    assert weight == pytest.approx(4.0)
    path, weight = shortest_path(g, 2, 2)
    assert path == [2] and weight == 0.0


def test_dijkstra_tie_prefers_smaller_predecessor():
    # two equal-cost routes into node 3: via 1 and via 2
    g = graph_from_edges(
        [(0, 0, 0), (1, 1, 0), (1, -1, 0), (2, 0, 0)],
        [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)],
    )
    _dist, pred = dijkstra_tree(g, 0)
    assert pred[3] == 1
    path, _w = shortest_path(g, 0, 3)
    assert path == [0, 1, 3]


def test_no_path_raised_across_components():
    g = graph_from_edges(
        [(0, 0, 0), (1, 0, 0), (5, 0, 0), (6, 0, 0)],
        unit([(0, 1), (2, 3)]),
    )
    with pytest.raises(NoPath):
        shortest_path(g, 0, 3)


# --- spanning trees ---------------------------------------------------------

def test_kruskal_weight_matches_exhaustive_oracle():
    g = kite_graph()
    forest = minimum_spanning_tree(g)
    assert forest.is_spanning_tree
    # 4.0 frozen from enumerating every 3-edge spanning subset
    assert forest.total_weight == pytest.approx(4.0)
    assert mst_weight_exhaustive(len(g), g.edges) == pytest.approx(4.0)


def test_kruskal_deterministic_on_ties():
    # all weights equal: chosen edges must follow (weight, small id, big id)
    g = graph_from_edges(
        [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)],
        unit([(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)]),
    )
    forest = kruskal_edges(range(len(g)), g.edges)
    assert [(i, j) for i, j, _w in forest.edges] == [(0, 1), (0, 2), (0, 3)]


def test_kruskal_forest_on_disconnected_graph():
    g = graph_from_edges(
        [(0, 0, 0), (1, 0, 0), (5, 0, 0), (6, 0, 0)],
        unit([(0, 1), (2, 3)]),
    )
    forest = minimum_spanning_tree(g)
    assert forest.component_count == 2
    assert not forest.is_spanning_tree
    assert len(forest.edges) == 2


def test_random_mst_weights_match_exhaustive(rng):
    for _ in range(25):
        g = random_connected_graph(rng, rng.randint(4, 7), 0.6)
        if len(g.edges) > 14:
            continue  # exhaustive enumeration budget
        expected = mst_weight_exhaustive(len(g), g.edges)
        got = minimum_spanning_tree(g).total_weight
        assert got == pytest.approx(expected, abs=1e-9)


def test_connected_components_sorted():
    g = graph_from_edges(
        [(0, 0, 0), (1, 0, 0), (5, 0, 0), (6, 0, 0), (9, 0, 0)],
        unit([(3, 2), (0, 1)]),
    )
    assert connected_components(g) == [[0, 1], [2, 3], [4]]


# --- degree and betweenness -------------------------------------------------

def test_degree_centrality_counts_neighbors():
    g = graph_from_edges(
        [(0, 0, 0), (1, 0, 0), (0, 1, 0), (-1, 0, 0)],
        unit([(0, 1), (0, 2), (0, 3)]),
    )
    scores = degree_centrality(g)
    assert scores.values == [3.0, 1.0, 1.0, 1.0]
    assert scores.metric == "degree"


def test_betweenness_on_path_and_cycle():
    # frozen from the dense all-pairs path-counting routine: P4 interior
    # nodes each sit on 2 of the 6 unordered pairs' shortest paths
    p4 = line_graph(4)
    assert betweenness_centrality(p4).values == pytest.approx([0.0, 2.0, 2.0, 0.0])
    pos5 = [
        (math.cos(2 * math.pi * k / 5), math.sin(2 * math.pi * k / 5), 0.0)
        for k in range(5)
    ]
    c5 = graph_from_edges(pos5, unit([(k, (k + 1) % 5) for k in range(5)]))
    assert betweenness_centrality(c5).values == pytest.approx([1.0] * 5)


def test_betweenness_weighted_kite():
    # frozen oracle values: all 0-3 traffic runs along 0-1-2-3
    g = kite_graph()
    assert betweenness_centrality(g).values == pytest.approx([0.0, 2.0, 2.0, 0.0])


def test_betweenness_star_center():
    n = 6
    g = graph_from_edges(
        [(0, 0, 0)] + [(math.cos(k), math.sin(k), 0) for k in range(n - 1)],
        unit([(0, k) for k in range(1, n)]),
    )
    scores = betweenness_centrality(g)
    assert scores.values[0] == pytest.approx((n - 1) * (n - 2) / 2)
    assert scores.values[1:] == pytest.approx([0.0] * (n - 1))


def test_betweenness_splits_equal_paths():
    # 4-cycle: each s-t diagonal pair has two shortest routes, half credit each
    g = graph_from_edges(
        [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)],
        unit([(0, 1), (1, 2), (2, 3), (0, 3)]),
    )
    assert betweenness_centrality(g).values == pytest.approx([0.5] * 4)


def test_betweenness_matches_oracle_on_random_graphs(rng):
    for _ in range(20):
        g = random_connected_graph(rng, rng.randint(5, 12), 0.5)
        got = betweenness_centrality(g).values
        expected = betweenness_oracle(g)
        assert got == pytest.approx(expected, abs=1e-9)


def test_betweenness_uniform_weights_agree_with_weighted_route(rng):
    # equal-weight graphs take a breadth-first fast path; forcing the general
    # weighted route by scaling one weight infinitesimally must not change
    # anything observable, and both must match the oracle
    for _ in range(10):
        n = rng.randint(5, 10)
        g = random_connected_graph(rng, n, 0.5)
        uniform = graph_from_edges(
            [node.position for node in g.nodes],
            [(i, j, 2.5) for i, j, _w in g.edges],
        )
        got = betweenness_centrality(uniform).values
        assert got == pytest.approx(betweenness_oracle(uniform), abs=1e-9)


def test_betweenness_unweighted_flag_ignores_weights():
    g = kite_graph()
    hops = betweenness_centrality(g, weighted=False).values
    # under hop counting the kite's direct edges 0-2 and 1-3 matter:
    # frozen from the path-counting oracle with unit weights
    assert hops == pytest.approx(betweenness_oracle(g, weighted=False), abs=1e-9)


# --- eigenvector and katz ---------------------------------------------------

def test_eigenvector_on_path3():
    g = line_graph(3)
    scores = eigenvector_centrality(g)
    # dominant eigenvector of the 3-path, max-normalized: (1/sqrt2, 1, 1/sqrt2)
    root_half = 1.0 / math.sqrt(2.0)
    assert scores.values == pytest.approx([root_half, 1.0, root_half], abs=1e-8)


def test_eigenvector_on_star():
    g = graph_from_edges(
        [(0, 0, 0), (1, 0, 0), (0, 1, 0), (-1, 0, 0)],
        unit([(0, 1), (0, 2), (0, 3)]),
    )
    scores = eigenvector_centrality(g)
    leaf = 1.0 / math.sqrt(3.0)
    assert scores.values == pytest.approx([1.0, leaf, leaf, leaf], abs=1e-8)


def test_eigenvector_matches_dense_oracle(rng):
    for _ in range(10):
        g = random_connected_graph(rng, rng.randint(4, 10), 0.6)
        got = eigenvector_centrality(g).values
        assert got == pytest.approx(eigenvector_oracle(g), abs=1e-6)


def test_eigenvector_rejects_edgeless_graph():
    g = graph_from_edges([(0, 0, 0), (1, 0, 0)], [])
    with pytest.raises(EmptyGraph):
        eigenvector_centrality(g)


def test_spectral_radius_known_graphs():
    triangle = graph_from_edges(
        [(0, 0, 0), (1, 0, 0), (0.5, 1, 0)], unit([(0, 1), (1, 2), (0, 2)])
    )
    assert spectral_radius(triangle) == pytest.approx(2.0, abs=1e-6)
    assert spectral_radius(line_graph(3)) == pytest.approx(math.sqrt(2.0), abs=1e-6)
    star = graph_from_edges(
        [(0, 0, 0), (1, 0, 0), (0, 1, 0), (-1, 0, 0)],
        unit([(0, 1), (0, 2), (0, 3)]),
    )
    assert spectral_radius(star) == pytest.approx(math.sqrt(3.0), abs=1e-6)


def test_katz_matches_series_oracle():
    g = kite_graph()
    scores = katz_centrality(g, alpha=0.25)
    # frozen limit of the attenuated walk series at alpha = 1/4
    assert scores.values == pytest.approx([1.5, 2.0, 2.0, 1.5], abs=1e-6)
    assert scores.values == pytest.approx(katz_oracle(g, 0.25), abs=1e-6)


def test_katz_default_alpha_converges(rng):
    for _ in range(5):
        g = random_connected_graph(rng, rng.randint(4, 8), 0.6)
        scores = katz_centrality(g)
        alpha = scores.params["alpha"]
        assert scores.values == pytest.approx(katz_oracle(g, alpha), abs=1e-6)
        assert all(v > 0.0 for v in scores.values)


def test_katz_rejects_alpha_at_or_beyond_threshold():
    triangle = graph_from_edges(
        [(0, 0, 0), (1, 0, 0), (0.5, 1, 0)], unit([(0, 1), (1, 2), (0, 2)])
    )
    # spectral radius 2 means the series only converges for alpha < 0.5
    with pytest.raises(AlphaTooLarge):
        katz_centrality(triangle, alpha=0.5)
    with pytest.raises(AlphaTooLarge):
        katz_centrality(triangle, alpha=0.9)
    scores = katz_centrality(triangle, alpha=0.4)
    assert scores.values == pytest.approx(katz_oracle(triangle, 0.4), abs=1e-6)


# --- dispatcher -------------------------------------------------------------

def test_compute_centrality_dispatch():
    g = line_graph(4)
    assert compute_centrality(g, "degree").values == [1.0, 2.0, 2.0, 1.0]
    assert compute_centrality(g, "betweenness").metric == "betweenness"
    assert compute_centrality(g, "eigenvector").metric == "eigenvector"
    assert compute_centrality(g, "katz").metric == "katz"
    with pytest.raises(ValidationError, match="unknown centrality"):
        compute_centrality(g, "pagerank")
