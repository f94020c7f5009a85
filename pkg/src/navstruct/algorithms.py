"""Core graph algorithms with deterministic tie-breaking.

Shortest paths prefer the lexicographically smallest predecessor among
equal-cost alternatives; spanning trees order candidate edges by
(weight, min endpoint, max endpoint).  Both rules make every downstream
structure reproducible bit-for-bit on identical input.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from heapq import heappop, heappush

import numpy as np

from .errors import AlphaTooLarge, EmptyGraph, NoConvergence, NoPath, ValidationError
from .graph import SurfaceGraph

INF = math.inf


# ---------------------------------------------------------------------------
# shortest paths
# ---------------------------------------------------------------------------

def dijkstra_tree(g: SurfaceGraph, src: int) -> tuple[list[float], list[int]]:
    """Single-source distances and predecessors.

    Ties between equal-cost paths keep the smallest predecessor id, so the
    recovered paths do not depend on heap internals.
    """
    adj = g.adjacency()
    n = len(adj)
    dist = [INF] * n
    pred = [-1] * n
    done = [False] * n
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        d, u = heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in adj[u]:
            if done[v]:
                continue
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heappush(heap, (nd, v))
            elif nd == dist[v] and u < pred[v]:
                pred[v] = u
    return dist, pred


def path_from_predecessors(pred: list[int], src: int, dst: int) -> list[int]:
    path = [dst]
    while path[-1] != src:
        p = pred[path[-1]]
        if p < 0:
            raise NoPath(f"no path recorded from {src} to {dst}")
        path.append(p)
    path.reverse()
    return path


def shortest_path(g: SurfaceGraph, src: int, dst: int) -> tuple[list[int], float]:
    """Minimum-weight path between two nodes; raises NoPath when disconnected."""
    n = len(g.nodes)
    if not (0 <= src < n and 0 <= dst < n):
        raise NoPath(f"node out of range: {src} or {dst}")
    if src == dst:
        return [src], 0.0
    dist, pred = dijkstra_tree(g, src)
    if dist[dst] == INF:
        raise NoPath(f"nodes {src} and {dst} are in different components")
    return path_from_predecessors(pred, src, dst), dist[dst]


# ---------------------------------------------------------------------------
# spanning trees
# ---------------------------------------------------------------------------

class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.rank = {x: 0 for x in items}

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


@dataclass
class SpanningForest:
    edges: list[tuple[int, int, float]]
    component_count: int

    @property
    def is_spanning_tree(self) -> bool:
        return self.component_count == 1

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))


def kruskal_edges(nodes, edges) -> SpanningForest:
    """Kruskal over an arbitrary id set; candidates sorted by
    (weight, min id, max id)."""
    uf = _UnionFind(nodes)
    ranked = sorted(
        ((w, i, j) if i < j else (w, j, i) for i, j, w in edges)
    )
    chosen = []
    for w, i, j in ranked:
        if uf.union(i, j):
            chosen.append((i, j, w))
    components = len({uf.find(x) for x in uf.parent})
    chosen.sort(key=lambda e: (e[0], e[1]))
    return SpanningForest(edges=chosen, component_count=components)


def minimum_spanning_tree(g: SurfaceGraph) -> SpanningForest:
    """Minimum spanning tree (forest when disconnected, flagged via
    component_count)."""
    return kruskal_edges(range(len(g.nodes)), g.edges)


def connected_components(g: SurfaceGraph) -> list[list[int]]:
    adj = g.adjacency()
    seen = [False] * len(adj)
    comps = []
    for s in range(len(adj)):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, _ in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        comps.append(sorted(comp))
    return comps


# ---------------------------------------------------------------------------
# centrality
# ---------------------------------------------------------------------------

@dataclass
class CentralityScores:
    metric: str
    values: list[float]
    params: dict = field(default_factory=dict)


def degree_centrality(g: SurfaceGraph) -> CentralityScores:
    """Incident edge count per node (unweighted)."""
    vals = [0.0] * len(g.nodes)
    for i, j, _ in g.edges:
        vals[i] += 1.0
        vals[j] += 1.0
    return CentralityScores(metric="degree", values=vals)


def betweenness_centrality(g: SurfaceGraph, weighted: bool = True) -> CentralityScores:
    """Exact betweenness: fractional shortest-path credit over unordered
    pairs, unnormalized.

    Uses the standard two-phase accumulation (forward shortest-path counting,
    reverse dependency propagation).  The inner loop is a priority-queue
    Dijkstra; when every edge carries the same weight the queue degenerates to
    FIFO order, so a plain breadth-first queue is used there — path structure
    and credits are identical, only faster.
    """
    adj = g.adjacency()
    n = len(adj)
    if weighted:
        weights = {w for _, _, w in g.edges}
        uniform = len(weights) <= 1
        adj_w = adj
    else:
        uniform = True
        adj_w = [[(v, 1.0) for v, _ in lst] for lst in adj]
    cb = [0.0] * n
    for s in range(n):
        if uniform:
            order, preds, sigma = _sssp_uniform(adj_w, s)
        else:
            order, preds, sigma = _sssp_dijkstra(adj_w, s)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    # undirected: each unordered pair was counted from both endpoints
    vals = [x / 2.0 for x in cb]
    return CentralityScores(
        metric="betweenness", values=vals, params={"weighted": weighted}
    )


def _sssp_dijkstra(adj, s):
    n = len(adj)
    dist = [INF] * n
    sigma = [0.0] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    done = [False] * n
    dist[s] = 0.0
    sigma[s] = 1.0
    order = []
    heap = [(0.0, s)]
    while heap:
        d, u = heappop(heap)
        if done[u]:
            continue
        done[u] = True
        order.append(u)
        for v, w in adj[u]:
            if done[v]:
                continue
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                sigma[v] = sigma[u]
                preds[v] = [u]
                heappush(heap, (nd, v))
            elif nd == dist[v]:
                sigma[v] += sigma[u]
                preds[v].append(u)
    return order, preds, sigma


def _sssp_uniform(adj, s):
    # breadth-first layers; valid because all edge weights are equal
    n = len(adj)
    depth = [-1] * n
    sigma = [0.0] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    depth[s] = 0
    sigma[s] = 1.0
    order = []
    queue = deque([s])
    while queue:
        u = queue.popleft()
        order.append(u)
        du = depth[u]
        for v, _ in adj[u]:
            if depth[v] < 0:
                depth[v] = du + 1
                queue.append(v)
            if depth[v] == du + 1:
                sigma[v] += sigma[u]
                preds[v].append(u)
    return order, preds, sigma


def _adjacency_matrix(g: SurfaceGraph) -> np.ndarray:
    n = len(g.nodes)
    a = np.zeros((n, n))
    for i, j, _ in g.edges:
        a[i, j] = 1.0
        a[j, i] = 1.0
    return a


def eigenvector_centrality(
    g: SurfaceGraph, tol: float = 1e-9, max_iter: int = 10000
) -> CentralityScores:
    """Principal-eigenvector scores of the unweighted adjacency matrix.

    Power iteration with an identity shift (A + I keeps the iteration from
    oscillating on bipartite graphs), normalized to unit max-norm.  Requires a
    connected graph with at least one edge.
    """
    if not g.edges:
        raise EmptyGraph("eigenvector centrality needs at least one edge")
    a = _adjacency_matrix(g)
    x = np.ones(len(g.nodes))
    x /= x.max()
    residual = INF
    for _ in range(max_iter):
        y = x + a @ x
        y /= y.max()
        residual = float(np.abs(y - x).max())
        x = y
        if residual < tol:
            return CentralityScores(
                metric="eigenvector",
                values=[float(v) for v in x],
                params={"tol": tol, "max_iter": max_iter},
            )
    raise NoConvergence("eigenvector power iteration did not converge", residual)


def spectral_radius(g: SurfaceGraph, tol: float = 1e-12, max_iter: int = 10000) -> float:
    """Largest adjacency eigenvalue via shifted power iteration."""
    if not g.edges:
        return 0.0
    a = _adjacency_matrix(g)
    x = np.ones(len(g.nodes))
    est = 1.0
    for _ in range(max_iter):
        y = x + a @ x
        new_est = float(y.max() / x.max())
        y /= y.max()
        shift = abs(new_est - est)
        x, est = y, new_est
        if shift < tol * max(1.0, est):
            break
    return est - 1.0


def katz_centrality(
    g: SurfaceGraph,
    alpha: float | None = None,
    tol: float = 1e-9,
    max_iter: int = 100000,
) -> CentralityScores:
    """Katz scores: sum over path lengths i of alpha^i * (A^i 1), evaluated
    term by term until the added term drops below `tol`.

    `alpha` must satisfy 0 < alpha < 1/spectral_radius; None selects
    0.9/spectral_radius.  AlphaTooLarge is raised when the series diverges.
    """
    n = len(g.nodes)
    radius = spectral_radius(g)
    if alpha is None:
        alpha = 0.9 / radius if radius > 1e-12 else 0.5
    if alpha <= 0.0:
        raise AlphaTooLarge(f"alpha must be positive, got {alpha}")
    if radius > 1e-12 and alpha * radius >= 1.0 - 1e-12:
        raise AlphaTooLarge(
            f"alpha {alpha:.6g} >= 1/spectral_radius {1.0 / radius:.6g}; series diverges"
        )
    a = _adjacency_matrix(g)
    term = alpha * (a @ np.ones(n))
    total = term.copy()
    growth_streak = 0
    prev_norm = float(np.abs(term).max()) if n else 0.0
    for _ in range(max_iter):
        if prev_norm < tol:
            return CentralityScores(
                metric="katz",
                values=[float(v) for v in total],
                params={"alpha": alpha, "tol": tol},
            )
        term = alpha * (a @ term)
        total += term
        norm = float(np.abs(term).max())
        growth_streak = growth_streak + 1 if norm > prev_norm else 0
        if growth_streak > 50:
            raise AlphaTooLarge(f"katz series diverges for alpha {alpha:.6g}")
        prev_norm = norm
    raise NoConvergence("katz series did not converge", prev_norm)


CENTRALITY_METRICS = ("degree", "betweenness", "eigenvector", "katz")


def compute_centrality(
    g: SurfaceGraph, metric: str, weighted: bool = True, alpha: float | None = None
) -> CentralityScores:
    """Dispatch by metric name; `weighted` only affects betweenness."""
    if metric == "degree":
        return degree_centrality(g)
    if metric == "betweenness":
        return betweenness_centrality(g, weighted=weighted)
    if metric == "eigenvector":
        return eigenvector_centrality(g)
    if metric == "katz":
        return katz_centrality(g, alpha=alpha)
    raise ValidationError(f"unknown centrality metric {metric!r}")
