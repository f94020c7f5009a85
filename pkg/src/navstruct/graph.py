"""Surface-derived graphs: polygon-center graphs, sampled-point graphs, JSON I/O."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .errors import AsymmetricNeighborhood, DegenerateEdge, ParseError, ValidationError
from .mesh import WalkableSurface

UP = np.array([0.0, 0.0, 1.0])

SOURCE_POLYGON = "polygon-center"
SOURCE_SAMPLE = "sample"
SOURCE_ENTRY_EXIT = "entry-exit"


@dataclass
class GraphNode:
    id: int
    position: np.ndarray  # (3,)
    normal: np.ndarray    # (3,) unit
    on_navmesh: bool = True
    source: str = SOURCE_POLYGON


@dataclass
class SurfaceGraph:
    """Undirected simple graph with 3D node payloads.

    Edges are stored once with i < j.  Node ids are dense 0..N-1.
    `node_index` maps source identifiers (polygon ids for navmesh-derived
    graphs, original node ids for rebuilt graphs) to node ids.
    """

    nodes: list[GraphNode]
    edges: list[tuple[int, int, float]]
    node_index: dict[int, int] | None = None
    _adjacency: list[list[tuple[int, float]]] | None = field(
        default=None, repr=False, compare=False
    )

    def __len__(self) -> int:
        return len(self.nodes)

    def adjacency(self) -> list[list[tuple[int, float]]]:
        """Per-node (neighbor, weight) lists, built lazily, neighbors ascending."""
        if self._adjacency is None:
            adj: list[list[tuple[int, float]]] = [[] for _ in self.nodes]
            for i, j, w in self.edges:
                adj[i].append((j, w))
                adj[j].append((i, w))
            for lst in adj:
                lst.sort()
            self._adjacency = adj
        return self._adjacency

    def positions(self) -> np.ndarray:
        return np.array([n.position for n in self.nodes])

    def centroid(self) -> np.ndarray:
        return self.positions().mean(axis=0)

    def with_extra_nodes(
        self, new_nodes: list[GraphNode], new_edges: list[tuple[int, int, float]]
    ) -> "SurfaceGraph":
        """Value-style extension: returns a new graph, leaves self untouched."""
        return SurfaceGraph(
            nodes=list(self.nodes) + list(new_nodes),
            edges=_canonical_edges(list(self.edges) + list(new_edges)),
            node_index=dict(self.node_index) if self.node_index else None,
        )


def _canonical_edges(edges: Iterable[tuple[int, int, float]]) -> list[tuple[int, int, float]]:
    out = []
    seen = set()
    for i, j, w in edges:
        if i == j:
            raise ValidationError(f"self-loop on node {i}")
        a, b = (i, j) if i < j else (j, i)
        if (a, b) in seen:
            raise ValidationError(f"duplicate edge ({a}, {b})")
        seen.add((a, b))
        out.append((a, b, float(w)))
    out.sort()
    return out


def graph_from_navmesh(surface: WalkableSurface) -> SurfaceGraph:
    """One node per polygon center, one edge per shared polygon edge.

    Edge weight is the Euclidean distance between the two centers; coincident
    centers raise DegenerateEdge.
    """
    nodes = [
        GraphNode(
            id=pid,
            position=surface.polygon_centers[pid].copy(),
            normal=surface.polygon_normals[pid].copy(),
            on_navmesh=True,
            source=SOURCE_POLYGON,
        )
        for pid in range(len(surface.polygons))
    ]
    edges = []
    for pid, nbrs in enumerate(surface.adjacency):
        for qid, _edge in nbrs:
            if pid < qid:
                w = float(
                    np.linalg.norm(surface.polygon_centers[pid] - surface.polygon_centers[qid])
                )
                if w < 1e-12:
                    raise DegenerateEdge(
                        f"polygon centers {pid} and {qid} coincide (zero-weight edge)"
                    )
                edges.append((pid, qid, w))
    return SurfaceGraph(
        nodes=nodes,
        edges=_canonical_edges(edges),
        node_index={pid: pid for pid in range(len(nodes))},
    )


def graph_from_sampling(
    points,
    neighbor_pairs: Iterable[tuple[int, int]],
    normals=None,
    weight_fn: Callable[[np.ndarray, np.ndarray], float] | None = None,
) -> SurfaceGraph:
    """Build a graph from sampled points and a symmetric neighborhood rule.

    `neighbor_pairs` lists directed pairs (i, j); every pair must have its
    reverse present or AsymmetricNeighborhood is raised.  Each undirected pair
    becomes one edge, weighted by `weight_fn` (Euclidean by default).  Sampled
    nodes default to a +Z normal when `normals` is None.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValidationError("points must be an (N, 3) array")
    n = len(pts)
    pair_set = set()
    for i, j in neighbor_pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise ValidationError(f"neighbor pair ({i}, {j}) out of range")
        if i == j:
            raise ValidationError(f"neighborhood rule yields self-pair ({i}, {i})")
        pair_set.add((i, j))
    for i, j in sorted(pair_set):
        if (j, i) not in pair_set:
            raise AsymmetricNeighborhood(f"pair ({i}, {j}) has no reverse ({j}, {i})")

    if normals is None:
        norm_arr = np.tile(UP, (n, 1))
    else:
        norm_arr = np.asarray(normals, dtype=float)
        if norm_arr.shape != (n, 3):
            raise ValidationError("normals must match points in shape")

    wf = weight_fn or (lambda p, q: float(np.linalg.norm(p - q)))
    edges = []
    for i, j in sorted(pair_set):
        if i < j:
            w = float(wf(pts[i], pts[j]))
            if w <= 0.0:
                raise DegenerateEdge(f"edge ({i}, {j}) has non-positive weight {w}")
            edges.append((i, j, w))

    nodes = [
        GraphNode(id=k, position=pts[k].copy(), normal=norm_arr[k].copy(),
                  on_navmesh=True, source=SOURCE_SAMPLE)
        for k in range(n)
    ]
    return SurfaceGraph(nodes=nodes, edges=_canonical_edges(edges))


def load_graph_json(path: str | Path) -> SurfaceGraph:
    """Load a graph from JSON: {"nodes": [{"pos": [...], "normal": [...]}],
    "edges": [[i, j, w], ...]}.  `normal` defaults to +Z; a 2-element edge
    entry gets a Euclidean weight."""
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "nodes" not in data or "edges" not in data:
        raise ParseError(f"{p}: expected object with 'nodes' and 'edges'")
    nodes = []
    for k, rec in enumerate(data["nodes"]):
        if not isinstance(rec, dict) or "pos" not in rec:
            raise ParseError(f"{p}: node {k} must be an object with 'pos'")
        pos = np.asarray(rec["pos"], dtype=float)
        if pos.shape != (3,):
            raise ParseError(f"{p}: node {k} 'pos' must have 3 components")
        normal = np.asarray(rec.get("normal", UP), dtype=float)
        if normal.shape != (3,):
            raise ParseError(f"{p}: node {k} 'normal' must have 3 components")
        nodes.append(
            GraphNode(id=k, position=pos, normal=normal, on_navmesh=True, source=SOURCE_SAMPLE)
        )
    edges = []
    for rec in data["edges"]:
        if not isinstance(rec, list) or len(rec) not in (2, 3):
            raise ParseError(f"{p}: edge entries must be [i, j] or [i, j, w]")
        i, j = int(rec[0]), int(rec[1])
        if not (0 <= i < len(nodes) and 0 <= j < len(nodes)):
            raise ParseError(f"{p}: edge ({i}, {j}) out of range")
        if len(rec) == 3:
            w = float(rec[2])
        else:
            w = float(np.linalg.norm(nodes[i].position - nodes[j].position))
        if w <= 0.0:
            raise DegenerateEdge(f"edge ({i}, {j}) has non-positive weight {w}")
        edges.append((i, j, w))
    return SurfaceGraph(nodes=nodes, edges=_canonical_edges(edges))


# -- sampling helpers -------------------------------------------------------

def grid_points(nx: int, ny: int, spacing: float = 1.0) -> np.ndarray:
    """Row-major lattice of nx*ny points in the z=0 plane."""
    pts = [(x * spacing, y * spacing, 0.0) for y in range(ny) for x in range(nx)]
    return np.array(pts, dtype=float)


def grid_neighbor_pairs(nx: int, ny: int) -> list[tuple[int, int]]:
    """Symmetric 4-neighborhood pairs for a row-major nx*ny lattice."""
    pairs = []
    for y in range(ny):
        for x in range(nx):
            i = y * nx + x
            if x + 1 < nx:
                pairs += [(i, i + 1), (i + 1, i)]
            if y + 1 < ny:
                pairs += [(i, i + nx), (i + nx, i)]
    return pairs
