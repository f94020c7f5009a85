import json
import logging

import numpy as np
import pytest

from navstruct.cli import main
from navstruct.errors import ValidationError
from navstruct.fixtures import graph_from_edges
from navstruct.mesh import build_blocker_mesh
from navstruct.pipeline import (
    STAGE_INITIAL,
    STAGE_POST,
    STAGE_ROOTING,
    STAGE_SIMPLIFY,
    STAGE_STEINER,
    STAGE_TERMINALS,
    PipelineConfig,
    run_extract,
    run_pipeline,
    steiner_subgraph,
)
from navstruct.steiner import build_steiner_tree
from navstruct.terminals import TerminalSet

STAGE_ORDER = [
    STAGE_INITIAL, STAGE_TERMINALS, STAGE_STEINER,
    STAGE_ROOTING, STAGE_SIMPLIFY, STAGE_POST,
]


def corridor_cfg(**kw):
    base = dict(terminals="entry-exit", interval=1.0, experiment="corridor")
    base.update(kw)
    return PipelineConfig(**base)


def chain_graph(n=4):
    return graph_from_edges(
        [(float(k), 0.0, 0.0) for k in range(n)],
        [(k, k + 1, 1.0) for k in range(n - 1)],
    )


def wall_blockers(x):
    """Vertical quad crossing the x axis at `x`, as two blocker triangles."""
    verts = [(x, -1, -1), (x, 1, -1), (x, 1, 1), (x, -1, 1)]
    return build_blocker_mesh(verts, [(0, 1, 2), (0, 2, 3)])


def write_chain_json(path, n=4, edges=None):
    data = {
        "nodes": [{"pos": [float(k), 0.0, 0.0]} for k in range(n)],
        "edges": edges if edges is not None else [[k, k + 1] for k in range(n - 1)],
    }
    path.write_text(json.dumps(data))
    return path


def write_corridor_files(corridor, tmp_path):
    surface, blockers = corridor
    surf = tmp_path / "corridor.json"
    surf.write_text(json.dumps({
        "vertices": [[float(x) for x in v] for v in surface.vertices],
        "polygons": [[int(i) for i in poly] for poly in surface.polygons],
    }))
    blk = tmp_path / "walls.json"
    blk.write_text(json.dumps({
        "vertices": [[float(x) for x in v] for v in blockers.vertices],
        "triangles": [[int(i) for i in t] for t in blockers.triangles],
    }))
    return surf, blk


# --- config validation ------------------------------------------------------

@pytest.mark.parametrize("overrides, message", [
    (dict(), "exactly one"),
    (dict(surface_path="s.obj", graph_path="g.json"), "exactly one"),
    (dict(graph_path="g.json"), "require a surface"),
    (dict(surface_path="s.obj", terminals="bogus"), "unknown terminal method"),
    (dict(surface_path="s.obj", metric="bogus"), "unknown terminal metric"),
    (dict(surface_path="s.obj", root_metric="bogus"), "unknown root metric"),
    (dict(surface_path="s.obj", centrality_weights="fancy"), "centrality weights"),
    (dict(surface_path="s.obj", interval=0.0), "interval must be positive"),
    (dict(surface_path="s.obj", radius=-1.0), "radius must be positive"),
    (dict(surface_path="s.obj", sharpness_deg=0.0), "sharpness_deg must be positive"),
    (dict(surface_path="s.obj", los_height_tol=0.0), "los_height_tol must be positive"),
    (dict(surface_path="s.obj", ray_count=0), "ray_count"),
    (dict(surface_path="s.obj", k=0), "k must be"),
    (dict(surface_path="s.obj", normal_tol_deg=95.0), "normal_tol_deg"),
    (dict(surface_path="s.obj", weld_eps=-1.0), "weld_eps"),
    (dict(surface_path="s.obj", plane_eps=0.0), "plane_eps"),
    (dict(surface_path="s.obj", density_buckets=1), "density_buckets"),
    (dict(surface_path="s.obj", exit_offset=-0.1), "exit_offset"),
])
def test_config_validation_rejects(overrides, message):
    with pytest.raises(ValidationError, match=message):
        PipelineConfig(**overrides).validate()


def test_config_validation_with_loaded_inputs_skips_path_checks():
    PipelineConfig(terminals="leaves").validate(loaded=True)


def test_run_pipeline_requires_exactly_one_input():
    cfg = PipelineConfig(terminals="leaves")
    with pytest.raises(ValidationError, match="exactly one"):
        run_pipeline(cfg)
    with pytest.raises(ValidationError, match="require a surface"):
        run_pipeline(PipelineConfig(), graph=chain_graph())


# --- steiner subgraph -------------------------------------------------------

def test_steiner_subgraph_renumbers_densely():
    g = graph_from_edges(
        [(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0), (1, 1, 0), (2, 1, 0)],
        [
            (0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0),
            (1, 4, 1.0), (4, 5, 1.0), (2, 5, 1.0),
        ],
    )
    tree = build_steiner_tree(
        g, TerminalSet(node_ids=[0, 3, 5], selection_method="metric")
    )
    sub, index = steiner_subgraph(g, tree)
    assert index == {0: 0, 1: 1, 2: 2, 3: 3, 5: 4}
    assert sub.node_index == index
    assert sub.edges == [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (2, 4, 1.0)]
    assert np.allclose(sub.nodes[4].position, g.nodes[5].position)


# --- pipeline routes --------------------------------------------------------

def test_corridor_extraction_stage_by_stage(corridor):
    surface, blockers = corridor
    result = run_pipeline(corridor_cfg(), surface=surface, blockers=blockers)
    report = result.report
    assert [s.name for s in report.stages] == STAGE_ORDER
    assert all(s.millis >= 0.0 for s in report.stages)
    assert report.total_millis > 0.0
    assert report.experiment == "corridor"

    assert report.stage(STAGE_INITIAL).nodes == 12
    assert report.stage(STAGE_INITIAL).edges == 11
    assert report.stage(STAGE_TERMINALS).nodes == 14
    assert report.stage(STAGE_TERMINALS).edges == 13
    assert report.stage(STAGE_TERMINALS).terminals == 2
    assert report.stage(STAGE_STEINER).nodes == 14
    assert report.stage(STAGE_STEINER).edges == 13
    assert report.stage(STAGE_SIMPLIFY).nodes == 3
    assert report.stage(STAGE_SIMPLIFY).edges == 2

    assert result.terminal_set.node_ids == [12, 13]
    (tree,) = result.forest
    assert tree.root == 5
    assert tree.node_ids() == [5, 12, 13]
    assert result.analysis_graph is None
    assert report.node_analysis is None


def test_corridor_analyze_recolors_the_structure(corridor):
    surface, blockers = corridor
    result = run_pipeline(
        corridor_cfg(analyze=True), surface=surface, blockers=blockers
    )
    assert result.analysis_graph is not None
    assert len(result.analysis_graph.nodes) == 3
    assert result.report.density_thresholds == [0.0, 0.0]
    assert result.report.node_analysis == [
        {"id": 5, "position": [5.5, 0.5, 0.0], "betweenness": 1.0, "density": "high"},
        {"id": 12, "position": [12.0, 0.0, 0.0], "betweenness": 0.0, "density": "low"},
        {"id": 13, "position": [0.0, 1.0, 0.0], "betweenness": 0.0, "density": "low"},
    ]


def test_graph_route_without_visibility_skips_simplify(caplog):
    cfg = PipelineConfig(terminals="leaves", experiment="chain")
    with caplog.at_level(logging.WARNING, logger="navstruct"):
        result = run_pipeline(cfg, graph=chain_graph())
    assert "simplification skipped" in caplog.text
    (tree,) = result.forest
    assert tree.root == 1  # betweenness tie between 1 and 2; both at the centroid
    assert tree.node_ids() == [0, 1, 2, 3]
    assert result.report.stage(STAGE_SIMPLIFY).nodes == 4


def test_graph_route_with_blockers_collapses_clear_spans():
    cfg = PipelineConfig(terminals="leaves", experiment="chain")
    result = run_pipeline(cfg, graph=chain_graph(), blockers=wall_blockers(100.0))
    (tree,) = result.forest
    assert tree.node_ids() == [0, 1, 3]


def test_graph_route_with_blockers_respects_a_wall():
    cfg = PipelineConfig(terminals="leaves", experiment="chain")
    result = run_pipeline(cfg, graph=chain_graph(), blockers=wall_blockers(2.5))
    (tree,) = result.forest
    assert tree.node_ids() == [0, 1, 2, 3]


def test_run_extract_loads_files(corridor, tmp_path):
    surf, blk = write_corridor_files(corridor, tmp_path)
    cfg = corridor_cfg(surface_path=str(surf), blockers_path=str(blk))
    result = run_extract(cfg)
    assert result.forest[0].node_ids() == [5, 12, 13]


# --- command line -----------------------------------------------------------

def test_cli_extract_graph_route(tmp_path):
    gp = write_chain_json(tmp_path / "chain.json")
    out = tmp_path / "out"
    code = main(["extract", "--graph", str(gp), "--terminals", "leaves",
                 "--out", str(out)])
    assert code == 0
    structure = json.loads((out / "structure.json").read_text())
    (tree,) = structure["trees"]
    assert tree["root"] == 1
    assert len(tree["nodes"]) == 4
    report = json.loads((out / "report.json").read_text())
    assert report["experiment"] == "chain"
    assert [s["name"] for s in report["stages"]] == STAGE_ORDER
    assert "node_analysis" not in report
    assert (out / "report.txt").read_text().startswith("experiment: chain\n")


def test_cli_extract_surface_route(corridor, tmp_path):
    surf, blk = write_corridor_files(corridor, tmp_path)
    out = tmp_path / "out"
    code = main(["extract", "--surface", str(surf), "--blockers", str(blk),
                 "--interval", "1.0", "--out", str(out),
                 "--format", "json", "--format", "obj"])
    assert code == 0
    assert (out / "overlay.obj").exists()
    assert not (out / "structure.dot").exists()
    structure = json.loads((out / "structure.json").read_text())
    assert structure["trees"][0]["root"] == 5
    assert len(structure["trees"][0]["nodes"]) == 3


def test_cli_analyze_adds_recoloring(corridor, tmp_path):
    surf, blk = write_corridor_files(corridor, tmp_path)
    out = tmp_path / "out"
    code = main(["analyze", "--surface", str(surf), "--blockers", str(blk),
                 "--interval", "1.0", "--out", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["density_thresholds"] == [0.0, 0.0]
    assert [rec["id"] for rec in report["node_analysis"]] == [5, 12, 13]
    assert [rec["density"] for rec in report["node_analysis"]] == ["high", "low", "low"]
    assert "density thresholds: [0, 0]" in (out / "report.txt").read_text()


def test_cli_config_file_fills_unset_flags(tmp_path):
    gp = write_chain_json(tmp_path / "chain.json")
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# demo configuration\n"
        "terminals = leaves\n"
        "format = dot, obj\n"
        "exit-offset = 0.0\n"
    )
    out = tmp_path / "out"
    code = main(["extract", "--graph", str(gp), "--config", str(cfg),
                 "--out", str(out)])
    assert code == 0
    assert (out / "structure.dot").exists()
    assert (out / "overlay.obj").exists()
    assert not (out / "structure.json").exists()


def test_cli_explicit_flags_beat_the_config_file(tmp_path):
    gp = write_chain_json(tmp_path / "chain.json")
    cfg = tmp_path / "run.cfg"
    cfg.write_text("terminals = metric\nk = 2\n")
    out = tmp_path / "out"
    code = main(["extract", "--graph", str(gp), "--config", str(cfg),
                 "--terminals", "leaves", "--out", str(out)])
    assert code == 0
    structure = json.loads((out / "structure.json").read_text())
    assert len(structure["trees"][0]["nodes"]) == 4  # leaves route, not top-2 metric


@pytest.mark.parametrize("text, message", [
    ("bogus = 1\n", "unknown config key"),
    ("k = abc\n", "bad value"),
    ("terminals = bogus\n", "bad value"),
    ("just-some-words\n", "expected key = value"),
])
def test_cli_rejects_bad_config_files(tmp_path, capsys, text, message):
    gp = write_chain_json(tmp_path / "chain.json")
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    code = main(["extract", "--graph", str(gp), "--config", str(cfg),
                 "--out", str(tmp_path / "out")])
    assert code == 2
    assert message in capsys.readouterr().err


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["extract", "--out", str(tmp_path)]) == 2  # no input at all
    assert "error:" in capsys.readouterr().err

    missing = tmp_path / "missing.json"
    assert main(["extract", "--graph", str(missing), "--terminals", "leaves",
                 "--out", str(tmp_path)]) == 4
    assert "i/o error:" in capsys.readouterr().err

    split = write_chain_json(tmp_path / "split.json", n=4, edges=[[0, 1], [2, 3]])
    assert main(["extract", "--graph", str(split), "--terminals", "leaves",
                 "--out", str(tmp_path)]) == 3

    ring = write_chain_json(
        tmp_path / "ring.json", n=4, edges=[[0, 1], [1, 2], [2, 3], [0, 3]]
    )
    assert main(["extract", "--graph", str(ring), "--terminals", "leaves",
                 "--out", str(tmp_path)]) == 2
    assert "degree-1" in capsys.readouterr().err


def test_cli_oracle_suites_pass(capsys):
    assert main(["oracle", "--instances", "2"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) >= 4
    for line in lines:
        assert line.startswith("oracle ")
        assert ": PASS (" in line


def test_cli_bench_repeats_the_run(tmp_path, capsys):
    gp = write_chain_json(tmp_path / "chain.json")
    code = main(["bench", "--graph", str(gp), "--terminals", "leaves",
                 "--repeat", "2"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.count("experiment: chain") == 2
