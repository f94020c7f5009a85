"""Terminal selection: boundary entry/exit detection and graph-metric picks.

Entry/exit detection walks each boundary loop at fixed arc-length intervals,
casts a small ray fan forward and backward along the boundary, and flags
samples whose fan never hits blocker geometry.  Runs of flagged samples become
segments whose endpoints are registered as new entry/exit graph nodes.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .algorithms import compute_centrality
from .errors import EmptyTerminalSet, ValidationError
from .graph import SOURCE_ENTRY_EXIT, GraphNode, SurfaceGraph
from .mesh import BlockerMesh, WalkableSurface
from .raycast import ray_hits

log = logging.getLogger("navstruct")

DEFAULT_INTERVAL = 0.5
DEFAULT_RADIUS = 1.0
DEFAULT_RAY_COUNT = 5
DEFAULT_SHARPNESS_DEG = 45.0
DEFAULT_HEIGHT_TOL = 0.5


@dataclass
class BoundarySample:
    position: np.ndarray      # (3,)
    loop: int                 # boundary loop index
    arc_param: float          # arc length from loop start
    forward_dir: np.ndarray   # unit tangent along the loop
    backward_dir: np.ndarray  # -forward_dir
    normal: np.ndarray        # surface normal of the owning polygon
    potential_start: bool = False
    potential_end: bool = False


@dataclass
class EntryExitSegment:
    start: BoundarySample
    end: BoundarySample
    samples: list[BoundarySample]
    matched_points: list[np.ndarray] = field(default_factory=list)


@dataclass
class TerminalSet:
    node_ids: list[int]
    selection_method: str
    params: dict = field(default_factory=dict)

    def __contains__(self, node_id: int) -> bool:
        return node_id in set(self.node_ids)


def sample_boundary(
    surface: WalkableSurface, interval: float = DEFAULT_INTERVAL
) -> list[BoundarySample]:
    """Samples spaced `interval` apart along each boundary loop.

    A loop of perimeter P yields max(1, floor(P / interval)) samples starting
    at the loop's first vertex.  Each sample carries the tangent of the edge
    it lies on and the normal of that edge's owning polygon.
    """
    if interval <= 0.0:
        raise ValidationError(f"sampling interval must be positive, got {interval}")
    samples: list[BoundarySample] = []
    for loop_id, loop in enumerate(surface.boundary_edges):
        seg_vecs = []
        seg_lens = []
        seg_normals = []
        for a, b in loop:
            pa = surface.vertices[a]
            pb = surface.vertices[b]
            vec = pb - pa
            length = float(np.linalg.norm(vec))
            owner = surface.edge_polygons[(a, b) if a < b else (b, a)][0]
            seg_vecs.append(vec / length)
            seg_lens.append(length)
            seg_normals.append(surface.polygon_normals[owner])
        perimeter = float(sum(seg_lens))
        count = max(1, int(math.floor(perimeter / interval + 1e-9)))
        edge_idx = 0
        edge_start_arc = 0.0
        for k in range(count):
            arc = k * interval
            while arc - edge_start_arc > seg_lens[edge_idx] - 1e-9 and edge_idx + 1 < len(loop):
                edge_start_arc += seg_lens[edge_idx]
                edge_idx += 1
            local = arc - edge_start_arc
            a, _b = loop[edge_idx]
            pos = surface.vertices[a] + seg_vecs[edge_idx] * local
            fwd = seg_vecs[edge_idx]
            samples.append(
                BoundarySample(
                    position=pos,
                    loop=loop_id,
                    arc_param=arc,
                    forward_dir=fwd.copy(),
                    backward_dir=-fwd,
                    normal=seg_normals[edge_idx].copy(),
                )
            )
    return samples


def _rotate_about(axis: np.ndarray, v: np.ndarray, angle: float) -> np.ndarray:
    # Rodrigues rotation; axis must be unit length
    c, s = math.cos(angle), math.sin(angle)
    return v * c + np.cross(axis, v) * s + axis * float(np.dot(axis, v)) * (1.0 - c)


def _fan_hits(
    blockers: BlockerMesh | None,
    origin: np.ndarray,
    direction: np.ndarray,
    normal: np.ndarray,
    radius: float,
    ray_count: int,
) -> bool:
    """True when any ray of the +/-45 degree fan (rotated in the surface
    tangent plane) hits a blocker within `radius`."""
    if ray_count == 1:
        angles = [0.0]
    else:
        spread = math.pi / 4.0
        angles = [
            -spread + 2.0 * spread * k / (ray_count - 1) for k in range(ray_count)
        ]
    for ang in angles:
        d = _rotate_about(normal, direction, ang)
        if ray_hits(blockers, origin, d, radius):
            return True
    return False


def classify_samples(
    samples: list[BoundarySample],
    blockers: BlockerMesh | None,
    radius: float = DEFAULT_RADIUS,
    ray_count: int = DEFAULT_RAY_COUNT,
) -> list[BoundarySample]:
    """Flag samples whose forward (backward) ray fan is unobstructed as
    potential segment starts (ends).  Returns the same sample objects with
    flags set.  With no blocker mesh every sample gets both flags."""
    if radius <= 0.0:
        raise ValidationError(f"classification radius must be positive, got {radius}")
    if ray_count < 1:
        raise ValidationError(f"ray count must be >= 1, got {ray_count}")
    if blockers is None or len(blockers.triangles) == 0:
        log.warning("no blocker mesh supplied; every boundary sample is flagged open")
    for s in samples:
        s.potential_start = not _fan_hits(
            blockers, s.position, s.forward_dir, s.normal, radius, ray_count
        )
        s.potential_end = not _fan_hits(
            blockers, s.position, s.backward_dir, s.normal, radius, ray_count
        )
    return samples


def extract_segments(
    samples: list[BoundarySample],
    sharpness_deg: float = DEFAULT_SHARPNESS_DEG,
) -> list[EntryExitSegment]:
    """Group classified samples into entry/exit segments.

    A segment opens at a potential-start sample and extends along the loop; it
    closes after a potential-end sample whose successor is not flagged as an
    end, or just before the turning angle between consecutive samples exceeds
    `sharpness_deg`.  The closing end sample is included.
    """
    if not (0.0 < sharpness_deg < 180.0):
        raise ValidationError(f"sharpness threshold out of range: {sharpness_deg}")
    cos_limit = math.cos(math.radians(sharpness_deg))
    by_loop: dict[int, list[BoundarySample]] = {}
    for s in samples:
        by_loop.setdefault(s.loop, []).append(s)
    segments: list[EntryExitSegment] = []
    for loop_id in sorted(by_loop):
        loop_samples = sorted(by_loop[loop_id], key=lambda s: s.arc_param)
        n = len(loop_samples)
        k = 0
        while k < n:
            s = loop_samples[k]
            if not s.potential_start:
                k += 1
                continue
            run = [s]
            j = k
            while j + 1 < n:
                nxt = loop_samples[j + 1]
                turn_cos = float(np.dot(run[-1].forward_dir, nxt.forward_dir))
                if turn_cos < cos_limit:
                    break  # boundary turns too sharply
                if run[-1].potential_end and not nxt.potential_end:
                    break  # an end sample followed by a non-end sample
                run.append(nxt)
                j += 1
            segments.append(_make_segment(run))
            k = j + 1
    return segments


def _make_segment(run: list[BoundarySample]) -> EntryExitSegment:
    start, end = run[0], run[-1]
    points = [start.position.copy()]
    if float(np.linalg.norm(end.position - start.position)) > 1e-9:
        points.append(end.position.copy())
    return EntryExitSegment(start=start, end=end, samples=run, matched_points=points)


def register_terminals(
    g: SurfaceGraph,
    segments: list[EntryExitSegment],
    surface: WalkableSurface,
    exit_offset: float = 0.0,
    height_tol: float = DEFAULT_HEIGHT_TOL,
) -> tuple[SurfaceGraph, TerminalSet]:
    """Add one graph node per entry/exit position and link it to the nearest
    existing node.

    Positions are pushed `exit_offset` world units along the boundary's
    outward direction (tangent x surface normal).  Each new node's on_navmesh
    flag records whether its final position still lies on a walkable polygon
    within `height_tol`.  Returns a new graph; the input graph is untouched.
    """
    positions = g.positions()
    new_nodes: list[GraphNode] = []
    new_edges: list[tuple[int, int, float]] = []
    ids: list[int] = []
    next_id = len(g.nodes)
    seen: list[np.ndarray] = []
    for seg in segments:
        for base, sample in zip(
            seg.matched_points, [seg.start, seg.end][: len(seg.matched_points)]
        ):
            outward = np.cross(sample.forward_dir, sample.normal)
            pos = base + outward * exit_offset
            if any(float(np.linalg.norm(pos - q)) < 1e-9 for q in seen):
                continue  # segments may share endpoints; register once
            seen.append(pos)
            dists = np.linalg.norm(positions - pos, axis=1)
            nearest = int(np.argmin(dists))  # ties resolve to the lowest id
            w = float(dists[nearest])
            if w < 1e-12:
                raise ValidationError(
                    f"entry/exit position coincides with node {nearest}"
                )
            on_mesh = surface.locate_point(pos, height_tol) is not None
            new_nodes.append(
                GraphNode(
                    id=next_id,
                    position=pos,
                    normal=sample.normal.copy(),
                    on_navmesh=on_mesh,
                    source=SOURCE_ENTRY_EXIT,
                )
            )
            new_edges.append((nearest, next_id, w))
            ids.append(next_id)
            next_id += 1
    out = g.with_extra_nodes(new_nodes, new_edges)
    terminals = TerminalSet(
        node_ids=ids,
        selection_method="entry-exit",
        params={"exit_offset": exit_offset},
    )
    return out, terminals


def entry_exit_terminals(
    g: SurfaceGraph,
    surface: WalkableSurface,
    blockers: BlockerMesh | None,
    interval: float = DEFAULT_INTERVAL,
    radius: float = DEFAULT_RADIUS,
    ray_count: int = DEFAULT_RAY_COUNT,
    sharpness_deg: float = DEFAULT_SHARPNESS_DEG,
    exit_offset: float = 0.0,
    height_tol: float = DEFAULT_HEIGHT_TOL,
) -> tuple[SurfaceGraph, TerminalSet]:
    """Full entry/exit pipeline: sample, classify, segment, register."""
    samples = sample_boundary(surface, interval)
    classify_samples(samples, blockers, radius, ray_count)
    segments = extract_segments(samples, sharpness_deg)
    graph, terminals = register_terminals(g, segments, surface, exit_offset, height_tol)
    if not terminals.node_ids:
        raise EmptyTerminalSet("entry/exit detection found no openings")
    terminals.params.update(
        {
            "interval": interval,
            "radius": radius,
            "ray_count": ray_count,
            "sharpness_deg": sharpness_deg,
        }
    )
    return graph, terminals


def terminals_from_metric(
    g: SurfaceGraph,
    method: str,
    metric: str = "degree",
    k: int = 1,
    weighted: bool = True,
) -> TerminalSet:
    """Terminal selection without boundary geometry.

    method "leaves": every node of degree 1.  method "metric": the k nodes
    with the highest centrality scores (ties prefer the lower id).
    """
    if method == "leaves":
        degs = [0] * len(g.nodes)
        for i, j, _ in g.edges:
            degs[i] += 1
            degs[j] += 1
        ids = [v for v, d in enumerate(degs) if d == 1]
        if not ids:
            raise EmptyTerminalSet("graph has no degree-1 nodes")
        return TerminalSet(node_ids=ids, selection_method="leaves")
    if method == "metric":
        if k < 1:
            raise ValidationError(f"k must be >= 1, got {k}")
        scores = compute_centrality(g, metric, weighted=weighted)
        ranked = sorted(
            range(len(g.nodes)), key=lambda v: (-scores.values[v], v)
        )
        ids = sorted(ranked[: min(k, len(ranked))])
        if not ids:
            raise EmptyTerminalSet("metric selection produced no terminals")
        return TerminalSet(
            node_ids=ids, selection_method="metric", params={"metric": metric, "k": k}
        )
    raise ValidationError(f"unknown terminal method {method!r}")
