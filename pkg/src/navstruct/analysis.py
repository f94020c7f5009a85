"""Map-analysis helpers: forest-to-graph conversion, density classes, and
per-stage run reports."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateEdge, ValidationError
from .graph import GraphNode, SurfaceGraph
from .trees import RootedTree


def forest_to_graph(forest: list[RootedTree]) -> SurfaceGraph:
    """Rebuild a dense graph from rooted trees: one node per tree node, one
    edge per parent-child pair, weighted by Euclidean distance.

    `node_index` maps each original node id to its new dense id.
    """
    originals: list[int] = []
    payloads = {}
    for tree in forest:
        for v in tree.node_ids():
            if v in payloads:
                raise ValidationError(f"node {v} appears in more than one tree")
            payloads[v] = tree.payloads[v]
            originals.append(v)
    originals.sort()
    index = {orig: k for k, orig in enumerate(originals)}
    nodes = [
        GraphNode(
            id=index[orig],
            position=payloads[orig].position,
            normal=payloads[orig].normal,
            on_navmesh=payloads[orig].on_navmesh,
            source=payloads[orig].source,
        )
        for orig in originals
    ]
    edges = []
    for tree in forest:
        for p, c in tree.edge_list():
            i, j = index[p], index[c]
            if i > j:
                i, j = j, i
            w = float(np.linalg.norm(payloads[p].position - payloads[c].position))
            if w < 1e-12:
                raise DegenerateEdge(f"tree edge ({p}, {c}) has zero length")
            edges.append((i, j, w))
    edges.sort()
    return SurfaceGraph(nodes=nodes, edges=edges, node_index=index)


@dataclass
class DensityClasses:
    labels: list[str]       # per node
    thresholds: list[float]
    buckets: int


_TERCILE_NAMES = ("low", "medium", "high")


def density_classes(values: list[float], buckets: int = 3) -> DensityClasses:
    """Rank-based density buckets (terciles by default).

    Thresholds sit at the rank-ceil(i*n/buckets) values of the sorted scores;
    a node's class is the first bucket whose threshold its value does not
    exceed.  Equal values therefore always share a class, and with all values
    equal every node lands in the lowest bucket.
    """
    if buckets < 2:
        raise ValidationError(f"density bucket count must be >= 2, got {buckets}")
    n = len(values)
    if n == 0:
        return DensityClasses(labels=[], thresholds=[], buckets=buckets)
    order = sorted(range(n), key=lambda v: (values[v], v))
    thresholds = []
    for i in range(1, buckets):
        rank = -(-i * n // buckets) - 1  # ceil(i*n/buckets) - 1
        thresholds.append(float(values[order[rank]]))
    names = (
        _TERCILE_NAMES if buckets == 3 else tuple(f"b{k}" for k in range(buckets))
    )
    labels = []
    for v in range(n):
        bucket = buckets - 1
        for k, t in enumerate(thresholds):
            if values[v] <= t:
                bucket = k
                break
        labels.append(names[bucket])
    return DensityClasses(labels=labels, thresholds=thresholds, buckets=buckets)


@dataclass
class StageRecord:
    name: str
    millis: float
    nodes: int | None = None
    edges: int | None = None
    terminals: int | None = None


@dataclass
class AnalysisReport:
    experiment: str
    stages: list[StageRecord]
    total_millis: float
    node_analysis: list[dict] | None = None
    density_thresholds: list[float] | None = None

    def stage(self, name: str) -> StageRecord:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)


def stage_metrics(
    experiment: str,
    stages: list[StageRecord],
    total_millis: float,
    node_analysis: list[dict] | None = None,
    density_thresholds: list[float] | None = None,
) -> AnalysisReport:
    """Assemble the run report from pipeline instrumentation."""
    return AnalysisReport(
        experiment=experiment,
        stages=list(stages),
        total_millis=float(total_millis),
        node_analysis=node_analysis,
        density_thresholds=density_thresholds,
    )


def render_report_text(report: AnalysisReport) -> str:
    """Human-readable stage table (integer milliseconds)."""
    header = f"{'stage':<16} {'ms':>8} {'nodes':>7} {'edges':>7} {'terminals':>9}"
    lines = [f"experiment: {report.experiment}", header, "-" * len(header)]
    for s in report.stages:
        lines.append(
            f"{s.name:<16} {round(s.millis):>8d} "
            f"{s.nodes if s.nodes is not None else '-':>7} "
            f"{s.edges if s.edges is not None else '-':>7} "
            f"{s.terminals if s.terminals is not None else '-':>9}"
        )
    lines.append("-" * len(header))
    lines.append(f"{'total':<16} {round(report.total_millis):>8d}")
    if report.density_thresholds is not None:
        pretty = ", ".join(f"{t:.6g}" for t in report.density_thresholds)
        lines.append(f"density thresholds: [{pretty}]")
    return "\n".join(lines) + "\n"


def report_to_dict(report: AnalysisReport) -> dict:
    out: dict = {
        "experiment": report.experiment,
        "stages": [
            {
                "name": s.name,
                "millis": round(s.millis, 3),
                **({"nodes": s.nodes} if s.nodes is not None else {}),
                **({"edges": s.edges} if s.edges is not None else {}),
                **({"terminals": s.terminals} if s.terminals is not None else {}),
            }
            for s in report.stages
        ],
        "total_millis": round(report.total_millis, 3),
    }
    if report.node_analysis is not None:
        out["node_analysis"] = report.node_analysis
    if report.density_thresholds is not None:
        out["density_thresholds"] = report.density_thresholds
    return out
