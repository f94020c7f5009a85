"""Synthetic fixtures: corridor/hub/ramp surfaces, grid mazes, random graphs.

Shared by the test-suite and the bench/oracle subcommands.  Everything is
deterministic for a given seed.
"""
from __future__ import annotations

import math
import random

import numpy as np

from .graph import GraphNode, SOURCE_SAMPLE, SurfaceGraph, _canonical_edges
from .mesh import (
    BlockerMesh,
    MeshConfig,
    WalkableSurface,
    build_blocker_mesh,
    build_walkable_surface,
)

WALL_OFFSET = 0.01
WALL_Z = (-0.5, 1.0)


class _VertexPool:
    """Dedupes vertices so fixture polygons share welded indices."""

    def __init__(self):
        self.verts: list[tuple[float, float, float]] = []
        self.index: dict[tuple[float, float, float], int] = {}

    def add(self, p) -> int:
        key = (round(float(p[0]), 9), round(float(p[1]), 9), round(float(p[2]), 9))
        if key not in self.index:
            self.index[key] = len(self.verts)
            self.verts.append(key)
        return self.index[key]


def surface_from_squares(cells: list[tuple[float, float]], z: float = 0.0) -> WalkableSurface:
    """Unit squares (given by their min corner) in the z plane, CCW from +Z."""
    pool = _VertexPool()
    polys = []
    for x, y in cells:
        ring = [
            pool.add((x, y, z)),
            pool.add((x + 1.0, y, z)),
            pool.add((x + 1.0, y + 1.0, z)),
            pool.add((x, y + 1.0, z)),
        ]
        polys.append(ring)
    return build_walkable_surface(pool.verts, polys)


def boundary_walls(
    surface: WalkableSurface,
    open_midpoints: list[tuple[float, float, float]] = (),
    offset: float = WALL_OFFSET,
    z_range: tuple[float, float] = WALL_Z,
) -> BlockerMesh:
    """Vertical wall quads along every boundary edge, pushed `offset` outward,
    except edges whose midpoint matches an entry in `open_midpoints`."""
    verts: list[list[float]] = []
    tris: list[list[int]] = []
    z_lo, z_hi = z_range
    opens = [np.asarray(m, dtype=float) for m in open_midpoints]
    for loop_idx, loop in enumerate(surface.boundary_edges):
        for a, b in loop:
            pa = surface.vertices[a]
            pb = surface.vertices[b]
            mid = (pa + pb) / 2.0
            if any(float(np.linalg.norm(mid - m)) < 1e-6 for m in opens):
                continue
            key = (a, b) if a < b else (b, a)
            owner = surface.edge_polygons[key][0]
            normal = surface.polygon_normals[owner]
            fwd = (pb - pa) / np.linalg.norm(pb - pa)
            outward = np.cross(fwd, normal)
            base = len(verts)
            for corner in (
                pa + outward * offset + np.array([0, 0, z_lo]),
                pb + outward * offset + np.array([0, 0, z_lo]),
                pb + outward * offset + np.array([0, 0, z_hi]),
                pa + outward * offset + np.array([0, 0, z_hi]),
            ):
                verts.append([float(x) for x in corner])
            tris.append([base, base + 1, base + 2])
            tris.append([base, base + 2, base + 3])
    return build_blocker_mesh(verts, tris)


def straight_corridor(n: int = 12) -> tuple[WalkableSurface, BlockerMesh]:
    """n collinear unit squares with both short ends open and side walls."""
    surface = surface_from_squares([(float(i), 0.0) for i in range(n)])
    open_mids = [(0.0, 0.5, 0.0), (float(n), 0.5, 0.0)]
    return surface, boundary_walls(surface, open_mids)


def plus_hub(arm: int = 2) -> tuple[WalkableSurface, BlockerMesh]:
    """Plus-shaped hub: central square with four arms of `arm` squares, the
    four arm ends open, everything else walled."""
    c = float(arm)
    cells = [(c, c)]
    for i in range(1, arm + 1):
        cells += [(c, c + i), (c, c - i), (c - i, c), (c + i, c)]
    surface = surface_from_squares(cells)
    far = 2.0 * arm + 1.0
    open_mids = [
        (c + 0.5, far, 0.0),   # north end
        (c + 0.5, 0.0, 0.0),   # south end
        (0.0, c + 0.5, 0.0),   # west end
        (far, c + 0.5, 0.0),   # east end
    ]
    return surface, boundary_walls(surface, open_mids)


def l_corridor() -> WalkableSurface:
    """Three squares east then one square north of the last: line of sight
    from the first to the last square is broken by the corner."""
    return surface_from_squares([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (2.0, 1.0)])


def ring_surface() -> WalkableSurface:
    """3x3 block of squares with the middle missing: two boundary loops."""
    cells = [
        (float(i), float(j)) for j in range(3) for i in range(3) if not (i == 1 and j == 1)
    ]
    return surface_from_squares(cells)


def grid_surface(nx: int, ny: int) -> WalkableSurface:
    return surface_from_squares(
        [(float(i), float(j)) for j in range(ny) for i in range(nx)]
    )


def ramp_corridor(angle_deg: float = 30.0) -> WalkableSurface:
    """Flat square, a ramp rising at `angle_deg`, then two flat squares at the
    top height.  The ramp's normal differs from its neighbors by the angle."""
    h = math.tan(math.radians(angle_deg))
    pool = _VertexPool()
    quads = [
        [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)],
        [(1, 0, 0), (2, 0, h), (2, 1, h), (1, 1, 0)],
        [(2, 0, h), (3, 0, h), (3, 1, h), (2, 1, h)],
        [(3, 0, h), (4, 0, h), (4, 1, h), (3, 1, h)],
    ]
    polys = [[pool.add(p) for p in quad] for quad in quads]
    return build_walkable_surface(pool.verts, polys)


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------

def graph_from_edges(positions, edges, source: str = SOURCE_SAMPLE) -> SurfaceGraph:
    """Direct graph construction for fixtures: explicit weighted edges."""
    pts = np.asarray(positions, dtype=float)
    nodes = [
        GraphNode(
            id=k, position=pts[k].copy(),
            normal=np.array([0.0, 0.0, 1.0]), on_navmesh=True, source=source,
        )
        for k in range(len(pts))
    ]
    return SurfaceGraph(nodes=nodes, edges=_canonical_edges(edges))


def maze_graph(nx: int, ny: int, seed: int = 0) -> SurfaceGraph:
    """Spanning tree of an nx*ny lattice carved by randomized depth-first
    search; dead ends give the graph plenty of leaves."""
    rng = random.Random(seed)
    pts = [(float(x), float(y), 0.0) for y in range(ny) for x in range(nx)]
    edges = []
    seen = [False] * (nx * ny)
    stack = [0]
    seen[0] = True
    while stack:
        v = stack[-1]
        x, y = v % nx, v // nx
        nbrs = []
        if x + 1 < nx and not seen[v + 1]:
            nbrs.append(v + 1)
        if x > 0 and not seen[v - 1]:
            nbrs.append(v - 1)
        if y + 1 < ny and not seen[v + nx]:
            nbrs.append(v + nx)
        if y > 0 and not seen[v - nx]:
            nbrs.append(v - nx)
        if not nbrs:
            stack.pop()
            continue
        u = rng.choice(nbrs)
        seen[u] = True
        edges.append((min(v, u), max(v, u), 1.0))
        stack.append(u)
    return graph_from_edges(pts, edges)


def random_connected_graph(
    rng: random.Random, n: int, p: float
) -> SurfaceGraph:
    """Random graph with edge probability p and weights uniform in (0, 1];
    resamples until connected."""
    while True:
        edges = []
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p:
                    edges.append((i, j, 1.0 - rng.random()))
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        merged = 0
        for i, j, _ in edges:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
                merged += 1
        if merged == n - 1:
            break
    positions = [(rng.uniform(0, 10), rng.uniform(0, 10), 0.0) for _ in range(n)]
    return graph_from_edges(positions, edges)


def random_tree_graph(rng: random.Random, n: int) -> SurfaceGraph:
    """Uniform-ish random tree: each node attaches to a random earlier node."""
    edges = []
    for v in range(1, n):
        u = rng.randrange(v)
        edges.append((u, v, 1.0 - rng.random()))
    positions = [(rng.uniform(0, 10), rng.uniform(0, 10), 0.0) for _ in range(n)]
    return graph_from_edges(positions, edges)
