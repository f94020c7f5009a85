"""Walkable-surface ingestion: parsing, validation, adjacency and boundary loops.

A walkable surface is a polygon soup of convex, planar rings welded on shared
vertices.  Every interior edge is shared by exactly two polygons; edges owned
by a single polygon form closed boundary loops.  With rings wound
counter-clockwise (viewed along the outward normal) the walkable interior lies
to the LEFT of each directed boundary edge.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .errors import ParseError, ValidationError

# default tolerance for planarity / convexity checks, in world units
PLANE_EPS = 1e-4


@dataclass
class MeshConfig:
    plane_eps: float = PLANE_EPS
    weld_eps: float = 0.0  # 0 disables vertex welding


@dataclass
class WalkableSurface:
    """Validated navigation surface with adjacency and boundary structure."""

    vertices: np.ndarray          # (V, 3) float64
    polygons: list[list[int]]     # vertex-index rings, CCW along outward normal
    polygon_normals: np.ndarray   # (P, 3) unit normals
    polygon_centers: np.ndarray   # (P, 3) ring centroids
    # per polygon: sorted (neighbor polygon id, shared undirected edge) pairs
    adjacency: list[list[tuple[int, tuple[int, int]]]]
    # loops of directed (a, b) edges; interior lies to the left of each edge
    boundary_edges: list[list[tuple[int, int]]]
    # undirected (min, max) edge -> owning polygon ids
    edge_polygons: dict[tuple[int, int], list[int]] = field(repr=False, default_factory=dict)

    @property
    def interior_edge_count(self) -> int:
        return sum(1 for polys in self.edge_polygons.values() if len(polys) == 2)

    @property
    def boundary_edge_count(self) -> int:
        return sum(len(loop) for loop in self.boundary_edges)

    def polygon_plane(self, poly_id: int) -> tuple[np.ndarray, float]:
        """Return (unit normal n, offset d) with n.p = d for points on the plane."""
        n = self.polygon_normals[poly_id]
        return n, float(np.dot(n, self.polygon_centers[poly_id]))

    def contains_point(self, poly_id: int, point, height_tol: float = 0.5) -> bool:
        """True when `point` projects inside the polygon and sits within
        `height_tol` of its plane (measured along the plane normal)."""
        p = np.asarray(point, dtype=float)
        n, d = self.polygon_plane(poly_id)
        if abs(float(np.dot(n, p)) - d) > height_tol:
            return False
        axis = int(np.argmax(np.abs(n)))
        keep = [i for i in range(3) if i != axis]
        ring = self.vertices[self.polygons[poly_id]][:, keep]
        q = p[keep]
        sign = _ring_winding_sign(ring)
        # convex containment: q on the interior side of every directed edge
        for i in range(len(ring)):
            a = ring[i]
            b = ring[(i + 1) % len(ring)]
            cross = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])
            if sign * cross < -1e-9:
                return False
        return True

    def locate_point(self, point, height_tol: float = 0.5) -> int | None:
        """Lowest polygon id containing `point`, or None when off-mesh."""
        for pid in range(len(self.polygons)):
            if self.contains_point(pid, point, height_tol):
                return pid
        return None


@dataclass
class BlockerMesh:
    """Triangle soup used purely as a raycast target (walls, obstacles)."""

    vertices: np.ndarray   # (V, 3) float64
    triangles: np.ndarray  # (T, 3) int


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_OBJ_IGNORED = {"vn", "vt", "vp", "o", "g", "s", "mtllib", "usemtl"}


def _parse_obj(path: Path) -> tuple[list[list[float]], list[list[int]]]:
    verts: list[list[float]] = []
    faces: list[list[int]] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        tag = fields[0]
        if tag == "v":
            if len(fields) < 4:
                raise ParseError(f"{path}:{lineno}: vertex record needs 3 coordinates")
            try:
                verts.append([float(x) for x in fields[1:4]])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad vertex coordinate") from exc
        elif tag == "f":
            ring = []
            for tok in fields[1:]:
                head = tok.split("/")[0]
                try:
                    idx = int(head)
                except ValueError as exc:
                    raise ParseError(f"{path}:{lineno}: bad face index {tok!r}") from exc
                if idx <= 0:
                    raise ParseError(f"{path}:{lineno}: face indices must be positive (1-based)")
                ring.append(idx - 1)
            if len(ring) < 3:
                raise ParseError(f"{path}:{lineno}: face needs at least 3 vertices")
            faces.append(ring)
        elif tag in _OBJ_IGNORED:
            continue  # harmless metadata records
        else:
            raise ParseError(f"{path}:{lineno}: unsupported OBJ record {tag!r}")
    return verts, faces


def _parse_surface_json(path: Path) -> tuple[list[list[float]], list[list[int]]]:
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "vertices" not in data or "polygons" not in data:
        raise ParseError(f"{path}: expected object with 'vertices' and 'polygons'")
    verts = data["vertices"]
    polys = data["polygons"]
    if not isinstance(verts, list) or not all(
        isinstance(v, list) and len(v) == 3 for v in verts
    ):
        raise ParseError(f"{path}: 'vertices' must be a list of [x, y, z] triples")
    if not isinstance(polys, list) or not all(isinstance(p, list) for p in polys):
        raise ParseError(f"{path}: 'polygons' must be a list of index rings")
    return [[float(x) for x in v] for v in verts], [[int(i) for i in p] for p in polys]


def _parse_geometry(path: str | Path) -> tuple[list[list[float]], list[list[int]]]:
    p = Path(path)
    suffix = p.suffix.lower()
    if suffix == ".obj":
        return _parse_obj(p)
    if suffix == ".json":
        return _parse_surface_json(p)
    raise ParseError(f"{p}: unsupported file extension {suffix!r} (expected .obj or .json)")


# ---------------------------------------------------------------------------
# geometry helpers
# ---------------------------------------------------------------------------

def _newell_normal(ring_pts: np.ndarray) -> np.ndarray:
    """Area-weighted ring normal; direction follows the ring winding."""
    n = np.zeros(3)
    k = len(ring_pts)
    for i in range(k):
        a = ring_pts[i]
        b = ring_pts[(i + 1) % k]
        n[0] += (a[1] - b[1]) * (a[2] + b[2])
        n[1] += (a[2] - b[2]) * (a[0] + b[0])
        n[2] += (a[0] - b[0]) * (a[1] + b[1])
    return n


def _ring_winding_sign(ring2d: np.ndarray) -> float:
    area2 = 0.0
    k = len(ring2d)
    for i in range(k):
        a = ring2d[i]
        b = ring2d[(i + 1) % k]
        area2 += a[0] * b[1] - b[0] * a[1]
    return 1.0 if area2 >= 0.0 else -1.0


def _weld(verts: np.ndarray, polys: list[list[int]], eps: float):
    """Merge vertices closer than eps; remap rings and drop repeats."""
    tree = cKDTree(verts)
    pairs = tree.query_pairs(eps)
    parent = list(range(len(verts)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    roots = sorted({find(i) for i in range(len(verts))})
    remap = {r: k for k, r in enumerate(roots)}
    new_verts = verts[roots]
    new_polys = []
    for ring in polys:
        mapped = [remap[find(i)] for i in ring]
        cleaned = [v for k, v in enumerate(mapped) if v != mapped[(k - 1) % len(mapped)]]
        if len(cleaned) == len(mapped):
            cleaned = mapped
        new_polys.append(cleaned)
    return new_verts, new_polys


# ---------------------------------------------------------------------------
# construction / validation
# ---------------------------------------------------------------------------

def build_walkable_surface(
    vertices, polygons, config: MeshConfig | None = None
) -> WalkableSurface:
    """Validate raw vertices/rings and assemble the full surface structure.

    Raises ValidationError naming the offending polygon or edge when a ring is
    degenerate, non-planar, non-convex, or when an edge is shared by more than
    two polygons.
    """
    cfg = config or MeshConfig()
    verts = np.asarray(vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 3:
        raise ValidationError("vertices must be an (N, 3) array")
    polys = [list(map(int, ring)) for ring in polygons]

    if cfg.weld_eps > 0.0 and len(verts):
        verts, polys = _weld(verts, polys, cfg.weld_eps)

    if not polys:
        raise ValidationError("surface has no polygons")

    normals = np.zeros((len(polys), 3))
    centers = np.zeros((len(polys), 3))
    for pid, ring in enumerate(polys):
        if len(ring) < 3:
            raise ValidationError(f"polygon {pid}: ring has fewer than 3 vertices")
        if any(i < 0 or i >= len(verts) for i in ring):
            raise ValidationError(f"polygon {pid}: vertex index out of range")
        if len(set(ring)) != len(ring):
            raise ValidationError(f"polygon {pid}: ring repeats a vertex")
        pts = verts[ring]
        for k in range(len(ring)):
            if np.linalg.norm(pts[(k + 1) % len(ring)] - pts[k]) < 1e-12:
                raise ValidationError(f"polygon {pid}: zero-length edge")
        n = _newell_normal(pts)
        norm = np.linalg.norm(n)
        if norm < 1e-12:
            raise ValidationError(f"polygon {pid}: degenerate (zero area)")
        n = n / norm
        center = pts.mean(axis=0)
        # planarity: every vertex within plane_eps of the centroid plane
        dev = np.abs((pts - center) @ n)
        if dev.max() > cfg.plane_eps:
            raise ValidationError(
                f"polygon {pid}: non-planar (deviation {dev.max():.3e} > {cfg.plane_eps:.3e})"
            )
        # convexity: consecutive edge turns must not flip against the normal
        for k in range(len(ring)):
            e0 = pts[(k + 1) % len(ring)] - pts[k]
            e1 = pts[(k + 2) % len(ring)] - pts[(k + 1) % len(ring)]
            turn = float(np.dot(np.cross(e0, e1), n))
            scale = float(np.linalg.norm(e0) * np.linalg.norm(e1))
            if turn < -cfg.plane_eps * scale:
                raise ValidationError(f"polygon {pid}: non-convex at ring position {k}")
        normals[pid] = n
        centers[pid] = center

    # edge bookkeeping: undirected identity is the sorted vertex pair
    edge_polygons: dict[tuple[int, int], list[int]] = {}
    directed_owner: dict[tuple[int, int], int] = {}
    for pid, ring in enumerate(polys):
        for k in range(len(ring)):
            a, b = ring[k], ring[(k + 1) % len(ring)]
            key = (a, b) if a < b else (b, a)
            owners = edge_polygons.setdefault(key, [])
            owners.append(pid)
            if len(owners) > 2:
                raise ValidationError(
                    f"edge {key}: shared by more than two polygons (non-manifold)"
                )
            directed_owner[(a, b)] = pid

    adjacency: list[list[tuple[int, tuple[int, int]]]] = [[] for _ in polys]
    boundary_directed: list[tuple[int, int]] = []
    for key, owners in edge_polygons.items():
        if len(owners) == 2:
            p, q = owners
            adjacency[p].append((q, key))
            adjacency[q].append((p, key))
        else:
            a, b = key
            # recover the direction the owning ring uses
            if (a, b) in directed_owner:
                boundary_directed.append((a, b))
            else:
                boundary_directed.append((b, a))
    for lst in adjacency:
        lst.sort()

    loops = _stitch_boundary_loops(boundary_directed)

    return WalkableSurface(
        vertices=verts,
        polygons=polys,
        polygon_normals=normals,
        polygon_centers=centers,
        adjacency=adjacency,
        boundary_edges=loops,
        edge_polygons=edge_polygons,
    )


def _stitch_boundary_loops(directed: list[tuple[int, int]]) -> list[list[tuple[int, int]]]:
    """Chain directed boundary edges into closed loops.

    Loops start at their smallest vertex id and are ordered by that id, which
    keeps downstream sampling deterministic.
    """
    outgoing: dict[int, list[tuple[int, int]]] = {}
    for e in directed:
        outgoing.setdefault(e[0], []).append(e)
    for lst in outgoing.values():
        lst.sort()

    unused = set(directed)
    loops = []
    for start_vertex in sorted(outgoing):
        for first in outgoing[start_vertex]:
            if first not in unused:
                continue
            loop = [first]
            unused.discard(first)
            cur = first
            while True:
                nxt = None
                for cand in outgoing.get(cur[1], ()):
                    if cand in unused:
                        nxt = cand
                        break
                if nxt is None:
                    break
                loop.append(nxt)
                unused.discard(nxt)
                cur = nxt
            if loop[-1][1] != loop[0][0]:
                raise ValidationError(
                    f"boundary chain starting at vertex {loop[0][0]} does not close"
                )
            loops.append(loop)
    # canonical rotation: begin each loop on its smallest vertex
    canonical = []
    for loop in loops:
        k = min(range(len(loop)), key=lambda i: loop[i][0])
        canonical.append(loop[k:] + loop[:k])
    canonical.sort(key=lambda lp: lp[0][0])
    return canonical


def load_walkable_surface(path: str | Path, config: MeshConfig | None = None) -> WalkableSurface:
    """Load and validate a walkable surface from an OBJ or JSON file.

    Args:
        path: ``.obj`` (v/f records) or ``.json`` with ``vertices``/``polygons``.
        config: planarity tolerance and optional weld epsilon.

    Raises:
        ParseError: malformed file.
        ValidationError: parsed geometry violates surface requirements.
        OSError: unreadable path.
    """
    verts, polys = _parse_geometry(path)
    return build_walkable_surface(verts, polys, config)


def build_blocker_mesh(vertices, triangles) -> BlockerMesh:
    verts = np.asarray(vertices, dtype=float)
    tris = np.asarray(triangles, dtype=int)
    if tris.size == 0:
        tris = tris.reshape(0, 3)
    if verts.ndim != 2 or verts.shape[1] != 3:
        raise ValidationError("blocker vertices must be an (N, 3) array")
    if tris.ndim != 2 or tris.shape[1] != 3:
        raise ValidationError("blocker triangles must be an (M, 3) index array")
    if tris.size and (tris.min() < 0 or tris.max() >= len(verts)):
        raise ValidationError("blocker triangle index out of range")
    for t, (i, j, k) in enumerate(tris):
        area2 = np.linalg.norm(np.cross(verts[j] - verts[i], verts[k] - verts[i]))
        if area2 < 1e-12:
            raise ValidationError(f"blocker triangle {t}: degenerate (zero area)")
    return BlockerMesh(vertices=verts, triangles=tris)


def load_blocker_mesh(path: str | Path) -> BlockerMesh:
    """Load a triangles-only blocker mesh from OBJ or JSON."""
    p = Path(path)
    if p.suffix.lower() == ".json":
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"{p}: invalid JSON: {exc}") from exc
        if not isinstance(data, dict) or "vertices" not in data:
            raise ParseError(f"{p}: expected object with 'vertices' and 'triangles'")
        faces = data.get("triangles", data.get("polygons"))
        if faces is None:
            raise ParseError(f"{p}: expected object with 'vertices' and 'triangles'")
        verts = data["vertices"]
    else:
        verts, faces = _parse_obj(p)
    for f in faces:
        if len(f) != 3:
            raise ParseError(f"{p}: blocker faces must be triangles")
    return build_blocker_mesh(verts, faces)


def boundary_loops(surface: WalkableSurface) -> list[list[int]]:
    """Ordered vertex loops of the surface boundary (interior to the left)."""
    return [[edge[0] for edge in loop] for loop in surface.boundary_edges]
