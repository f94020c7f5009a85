"""End-to-end extraction pipeline with per-stage instrumentation.

Stages: build the surface graph, pick terminals, connect them with an
approximate Steiner tree, root the result by centrality, simplify under
visibility constraints, and (in analysis mode) recolor the final structure
with betweenness and density classes.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .algorithms import compute_centrality, CentralityScores, CENTRALITY_METRICS
from .analysis import (
    AnalysisReport,
    StageRecord,
    density_classes,
    forest_to_graph,
    stage_metrics,
)
from .errors import ValidationError
from .graph import GraphNode, SurfaceGraph, graph_from_navmesh, load_graph_json
from .mesh import BlockerMesh, MeshConfig, WalkableSurface, load_blocker_mesh, load_walkable_surface
from .raycast import segment_clear
from .steiner import SteinerTree, build_steiner_tree
from .terminals import TerminalSet, entry_exit_terminals, terminals_from_metric
from .trees import RootedTree, SimplifyConfig, find_rooted_trees, simplify_tree

log = logging.getLogger("navstruct")

TERMINAL_METHODS = ("entry-exit", "leaves", "metric")

STAGE_INITIAL = "initial-graph"
STAGE_TERMINALS = "terminals"
STAGE_STEINER = "steiner"
STAGE_ROOTING = "rooting"
STAGE_SIMPLIFY = "simplify"
STAGE_POST = "post-process"


@dataclass
class PipelineConfig:
    surface_path: str | None = None
    blockers_path: str | None = None
    graph_path: str | None = None
    weld_eps: float = 0.0
    plane_eps: float = 1e-4
    terminals: str = "entry-exit"        # entry-exit | leaves | metric
    metric: str = "degree"               # terminal-selection centrality
    k: int = 4                           # terminal count for metric selection
    interval: float = 0.5
    radius: float = 1.0
    ray_count: int = 5
    sharpness_deg: float = 45.0
    exit_offset: float = 0.0
    normal_tol_deg: float = 15.0
    los_height_tol: float = 0.5
    root_metric: str = "betweenness"
    centrality_weights: str = "euclidean"  # euclidean | unit
    katz_alpha: float | None = None
    density_buckets: int = 3
    analyze: bool = False
    seed: int = 0                        # synthetic fixture generation only
    experiment: str = "run"

    def validate(self, *, loaded: bool = False) -> None:
        if not loaded:
            if (self.surface_path is None) == (self.graph_path is None):
                raise ValidationError(
                    "exactly one of surface or graph input must be supplied"
                )
            if self.terminals == "entry-exit" and self.surface_path is None:
                raise ValidationError("entry-exit terminals require a surface input")
        if self.terminals not in TERMINAL_METHODS:
            raise ValidationError(f"unknown terminal method {self.terminals!r}")
        if self.metric not in CENTRALITY_METRICS:
            raise ValidationError(f"unknown terminal metric {self.metric!r}")
        if self.root_metric not in CENTRALITY_METRICS:
            raise ValidationError(f"unknown root metric {self.root_metric!r}")
        if self.centrality_weights not in ("euclidean", "unit"):
            raise ValidationError(
                f"centrality weights must be 'euclidean' or 'unit', got {self.centrality_weights!r}"
            )
        for name in ("interval", "radius", "sharpness_deg", "los_height_tol"):
            if getattr(self, name) <= 0.0:
                raise ValidationError(f"{name} must be positive")
        if self.ray_count < 1:
            raise ValidationError("ray_count must be >= 1")
        if self.k < 1:
            raise ValidationError("k must be >= 1")
        if not (0.0 < self.normal_tol_deg < 90.0):
            raise ValidationError("normal_tol_deg must be in (0, 90)")
        if self.weld_eps < 0.0 or self.plane_eps <= 0.0:
            raise ValidationError("weld_eps must be >= 0 and plane_eps > 0")
        if self.density_buckets < 2:
            raise ValidationError("density_buckets must be >= 2")
        if self.exit_offset < 0.0:
            raise ValidationError("exit_offset must be >= 0")

    def simplify_config(self) -> SimplifyConfig:
        return SimplifyConfig(
            normal_tolerance_deg=self.normal_tol_deg,
            los_height_tolerance=self.los_height_tol,
        )


@dataclass
class PipelineResult:
    forest: list[RootedTree]
    report: AnalysisReport
    graph: SurfaceGraph
    steiner: SteinerTree
    terminal_set: TerminalSet
    analysis_graph: SurfaceGraph | None = None


def steiner_subgraph(g: SurfaceGraph, tree: SteinerTree) -> tuple[SurfaceGraph, dict[int, int]]:
    """Dense relabeling of the Steiner tree as a standalone graph.

    Returns the graph and the original-id -> dense-id map (also stored as the
    graph's node_index).
    """
    index = {orig: k for k, orig in enumerate(tree.nodes)}
    nodes = [
        GraphNode(
            id=index[orig],
            position=g.nodes[orig].position,
            normal=g.nodes[orig].normal,
            on_navmesh=g.nodes[orig].on_navmesh,
            source=g.nodes[orig].source,
        )
        for orig in tree.nodes
    ]
    edges = sorted(
        (min(index[i], index[j]), max(index[i], index[j]), w)
        for i, j, w in tree.edges
    )
    return SurfaceGraph(nodes=nodes, edges=edges, node_index=index), index


def _root_scores(g: SurfaceGraph, tree: SteinerTree, cfg: PipelineConfig) -> CentralityScores:
    """Centrality of the Steiner tree's own nodes, scattered into an array
    indexed by the full graph's node ids."""
    sub, index = steiner_subgraph(g, tree)
    weighted = cfg.centrality_weights == "euclidean"
    sub_scores = compute_centrality(
        sub, cfg.root_metric, weighted=weighted, alpha=cfg.katz_alpha
    )
    values = [0.0] * len(g.nodes)
    for orig, dense in index.items():
        values[orig] = sub_scores.values[dense]
    return CentralityScores(
        metric=sub_scores.metric, values=values, params=sub_scores.params
    )


def run_pipeline(
    cfg: PipelineConfig,
    surface: WalkableSurface | None = None,
    blockers: BlockerMesh | None = None,
    graph: SurfaceGraph | None = None,
) -> PipelineResult:
    """Run the extraction stages on already-loaded inputs."""
    cfg.validate(loaded=True)
    if (surface is None) == (graph is None):
        raise ValidationError("exactly one of surface or graph must be supplied")
    if cfg.terminals == "entry-exit" and surface is None:
        raise ValidationError("entry-exit terminals require a surface input")

    stages: list[StageRecord] = []
    t_start = time.perf_counter_ns()

    # --- initial graph ----------------------------------------------------
    t0 = time.perf_counter_ns()
    g = graph_from_navmesh(surface) if surface is not None else graph
    t1 = time.perf_counter_ns()
    stages.append(
        StageRecord(
            name=STAGE_INITIAL, millis=(t1 - t0) / 1e6,
            nodes=len(g.nodes), edges=len(g.edges),
        )
    )

    # --- terminals --------------------------------------------------------
    t0 = time.perf_counter_ns()
    if cfg.terminals == "entry-exit":
        g, term_set = entry_exit_terminals(
            g, surface, blockers,
            interval=cfg.interval, radius=cfg.radius, ray_count=cfg.ray_count,
            sharpness_deg=cfg.sharpness_deg, exit_offset=cfg.exit_offset,
            height_tol=cfg.los_height_tol,
        )
    else:
        term_set = terminals_from_metric(
            g, cfg.terminals, metric=cfg.metric, k=cfg.k,
            weighted=cfg.centrality_weights == "euclidean",
        )
    t1 = time.perf_counter_ns()
    stages.append(
        StageRecord(
            name=STAGE_TERMINALS, millis=(t1 - t0) / 1e6,
            nodes=len(g.nodes), edges=len(g.edges),
            terminals=len(term_set.node_ids),
        )
    )

    # --- steiner ----------------------------------------------------------
    t0 = time.perf_counter_ns()
    stree = build_steiner_tree(g, term_set)
    t1 = time.perf_counter_ns()
    stages.append(
        StageRecord(
            name=STAGE_STEINER, millis=(t1 - t0) / 1e6,
            nodes=len(stree.nodes), edges=len(stree.edges),
        )
    )

    # --- rooting ----------------------------------------------------------
    t0 = time.perf_counter_ns()
    scores = _root_scores(g, stree, cfg)
    forest = find_rooted_trees(stree, g, scores, centroid=g.centroid())
    t1 = time.perf_counter_ns()
    stages.append(StageRecord(name=STAGE_ROOTING, millis=(t1 - t0) / 1e6))

    # --- simplify ---------------------------------------------------------
    t0 = time.perf_counter_ns()
    simplify_cfg = cfg.simplify_config()
    if surface is not None:
        forest = [simplify_tree(t, surface, simplify_cfg) for t in forest]
    elif blockers is not None:
        los = lambda a, c: segment_clear(blockers, a, c)  # noqa: E731
        forest = [simplify_tree(t, None, simplify_cfg, los=los) for t in forest]
    else:
        log.warning("no surface or blocker mesh: simplification skipped")
    t1 = time.perf_counter_ns()
    n_simpl = sum(t.size() for t in forest)
    e_simpl = sum(t.size() - 1 for t in forest)
    stages.append(
        StageRecord(
            name=STAGE_SIMPLIFY, millis=(t1 - t0) / 1e6,
            nodes=n_simpl, edges=e_simpl,
        )
    )

    # --- analysis mode ----------------------------------------------------
    node_analysis = None
    thresholds = None
    analysis_graph = None
    t0 = time.perf_counter_ns()
    if cfg.analyze:
        analysis_graph = forest_to_graph(forest)
        between = compute_centrality(
            analysis_graph, "betweenness",
            weighted=cfg.centrality_weights == "euclidean",
        )
        classes = density_classes(between.values, cfg.density_buckets)
        thresholds = classes.thresholds
        reverse = {dense: orig for orig, dense in analysis_graph.node_index.items()}
        node_analysis = [
            {
                "id": reverse[k],
                "position": [float(x) for x in analysis_graph.nodes[k].position],
                "betweenness": between.values[k],
                "density": classes.labels[k],
            }
            for k in range(len(analysis_graph.nodes))
        ]
    t1 = time.perf_counter_ns()
    stages.append(StageRecord(name=STAGE_POST, millis=(t1 - t0) / 1e6))
    total_ms = (t1 - t_start) / 1e6

    report = stage_metrics(
        experiment=cfg.experiment,
        stages=stages,
        total_millis=total_ms,
        node_analysis=node_analysis,
        density_thresholds=thresholds,
    )
    return PipelineResult(
        forest=forest, report=report, graph=g, steiner=stree,
        terminal_set=term_set, analysis_graph=analysis_graph,
    )


def run_extract(cfg: PipelineConfig) -> PipelineResult:
    """Load configured inputs from disk and run the pipeline."""
    cfg.validate()
    surface = None
    blockers = None
    graph = None
    if cfg.surface_path is not None:
        surface = load_walkable_surface(
            cfg.surface_path, MeshConfig(plane_eps=cfg.plane_eps, weld_eps=cfg.weld_eps)
        )
    if cfg.blockers_path is not None:
        blockers = load_blocker_mesh(cfg.blockers_path)
    if cfg.graph_path is not None:
        graph = load_graph_json(cfg.graph_path)
    return run_pipeline(cfg, surface=surface, blockers=blockers, graph=graph)
