"""Approximate Steiner trees over terminal node sets.

Classic distance-network construction: build the complete terminal graph
under shortest-path metric, take its spanning tree, expand every chosen
terminal pair back into its concrete shortest path, take a spanning tree of
that union, then prune non-terminal leaves.  Total weight is within
2*(1 - 1/leaf-count) of optimal.
"""
from __future__ import annotations

from dataclasses import dataclass

from .algorithms import dijkstra_tree, kruskal_edges, path_from_predecessors
from .errors import DisconnectedTerminals, EmptyTerminalSet
from .graph import SurfaceGraph
from .terminals import TerminalSet

INF = float("inf")


@dataclass
class SteinerTree:
    nodes: list[int]                      # sorted original graph node ids
    edges: list[tuple[int, int, float]]   # i < j, sorted
    terminals: TerminalSet
    total_weight: float

    def adjacency(self) -> dict[int, list[tuple[int, float]]]:
        adj: dict[int, list[tuple[int, float]]] = {v: [] for v in self.nodes}
        for i, j, w in self.edges:
            adj[i].append((j, w))
            adj[j].append((i, w))
        for lst in adj.values():
            lst.sort()
        return adj


def build_steiner_tree(g: SurfaceGraph, terminals: TerminalSet) -> SteinerTree:
    """Connect all terminals by a light subtree of `g`.

    Raises EmptyTerminalSet for an empty selection and DisconnectedTerminals
    (naming the pair) when two terminals live in different components.
    Deterministic: shortest paths and spanning trees use the fixed
    tie-breaking rules, and expansion always walks the predecessor tree of
    the smaller terminal id.
    """
    term_ids = sorted(set(terminals.node_ids))
    if not term_ids:
        raise EmptyTerminalSet("steiner construction needs at least one terminal")
    for t in term_ids:
        if not (0 <= t < len(g.nodes)):
            raise EmptyTerminalSet(f"terminal {t} is not a node of the graph")
    if len(term_ids) == 1:
        return SteinerTree(
            nodes=[term_ids[0]], edges=[], terminals=terminals, total_weight=0.0
        )

    runs = {t: dijkstra_tree(g, t) for t in term_ids}

    # complete terminal graph under the shortest-path metric
    metric_edges = []
    for a_idx, a in enumerate(term_ids):
        dist_a = runs[a][0]
        for b in term_ids[a_idx + 1:]:
            d = dist_a[b]
            if d == INF:
                raise DisconnectedTerminals((a, b))
            metric_edges.append((a, b, d))
    metric_mst = kruskal_edges(term_ids, metric_edges)

    # expand each metric edge into its concrete path
    weight_of = {(i, j): w for i, j, w in g.edges}
    union_nodes = set(term_ids)
    union_edges: dict[tuple[int, int], float] = {}
    for a, b, _w in metric_mst.edges:
        path = path_from_predecessors(runs[a][1], a, b)
        union_nodes.update(path)
        for u, v in zip(path, path[1:]):
            key = (u, v) if u < v else (v, u)
            union_edges[key] = weight_of[key]

    union_mst = kruskal_edges(
        sorted(union_nodes), [(i, j, w) for (i, j), w in union_edges.items()]
    )

    # prune non-terminal leaves until every leaf is a terminal
    term_set = set(term_ids)
    adj: dict[int, dict[int, float]] = {v: {} for v in union_nodes}
    for i, j, w in union_mst.edges:
        adj[i][j] = w
        adj[j][i] = w
    changed = True
    while changed:
        changed = False
        for v in sorted(adj):
            if v not in term_set and len(adj[v]) <= 1:
                for u in list(adj[v]):
                    del adj[u][v]
                del adj[v]
                changed = True

    nodes = sorted(adj)
    edges = sorted(
        (i, j, adj[i][j]) for i in nodes for j in adj[i] if i < j
    )
    total = float(sum(w for _, _, w in edges))
    return SteinerTree(nodes=nodes, edges=edges, terminals=terminals, total_weight=total)
