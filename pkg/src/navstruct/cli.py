"""Command-line interface.

Subcommands: `extract` (structure outputs), `analyze` (adds betweenness and
density recoloring), `bench` (stage timing tables), `oracle` (brute-force
self-checks).  A flat key=value config file can pre-set any flag; explicit
command-line flags win.  The STRUCT_LOG environment variable
(error|warn|info|debug) controls diagnostic verbosity.

Exit codes: 0 success, 2 validation failure, 3 disconnected terminals,
4 I/O failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .analysis import render_report_text, report_to_dict
from .errors import (
    DisconnectedTerminals,
    EmptyTerminalSet,
    NavStructError,
    NoPath,
    ParseError,
    ValidationError,
)
from .export import canonical_json, export_structure
from .pipeline import PipelineConfig, run_extract

log = logging.getLogger("navstruct")

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DISCONNECTED = 3
EXIT_IO = 4


def _setup_logging() -> None:
    level_name = os.environ.get("STRUCT_LOG", "warn").lower()
    level = _LOG_LEVELS.get(level_name, logging.WARNING)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("[%(levelname)s] %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(level)


def _add_pipeline_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value file pre-setting any flag")
    p.add_argument("--surface", help="walkable surface (.obj or .json)")
    p.add_argument("--blockers", help="blocker triangle mesh (.obj or .json)")
    p.add_argument("--graph", help="pre-built graph (.json) instead of a surface")
    p.add_argument("--weld-eps", type=float, default=0.0,
                   help="merge surface vertices closer than this (0 disables)")
    p.add_argument("--plane-eps", type=float, default=1e-4,
                   help="planarity/convexity tolerance")
    p.add_argument("--terminals", choices=["entry-exit", "leaves", "metric"],
                   default="entry-exit", help="terminal selection method")
    p.add_argument("--metric", choices=["degree", "betweenness", "eigenvector", "katz"],
                   default="degree", help="centrality for --terminals metric")
    p.add_argument("--k", type=int, default=4,
                   help="terminal count for --terminals metric")
    p.add_argument("--interval", type=float, default=0.5,
                   help="boundary sampling interval (world units)")
    p.add_argument("--radius", type=float, default=1.0,
                   help="classification ray length")
    p.add_argument("--ray-count", type=int, default=5,
                   help="rays per classification fan")
    p.add_argument("--sharpness-deg", type=float, default=45.0,
                   help="segment-breaking turn angle")
    p.add_argument("--exit-offset", type=float, default=0.0,
                   help="push entry/exit nodes outward by this distance")
    p.add_argument("--normal-tol-deg", type=float, default=15.0,
                   help="collapse normal-angle tolerance")
    p.add_argument("--los-height-tol", type=float, default=0.5,
                   help="line-of-sight height tolerance")
    p.add_argument("--root-metric",
                   choices=["degree", "betweenness", "eigenvector", "katz"],
                   default="betweenness", help="centrality used to pick roots")
    p.add_argument("--centrality-weights", choices=["euclidean", "unit"],
                   default="euclidean",
                   help="edge weighting for betweenness/shortest paths")
    p.add_argument("--katz-alpha", type=float, default=None,
                   help="attenuation for katz centrality (default 0.9/spectral-radius)")
    p.add_argument("--density-buckets", type=int, default=3,
                   help="density class count for analyze mode")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--format", action="append", choices=["json", "dot", "obj"],
                   default=None, help="structure export format (repeatable; default json)")
    p.add_argument("--experiment", default=None,
                   help="experiment name in reports (default: input stem)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for synthetic fixture generation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="navstruct",
        description="Extract simplified tree structures from walkable-surface geometry.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("extract", "extract the simplified structure and write exports"),
        ("analyze", "extract plus betweenness/density recoloring"),
        ("bench", "print per-stage timing tables"),
    ):
        sp = sub.add_parser(name, help=help_text)
        _add_pipeline_options(sp)
        if name == "bench":
            sp.add_argument("--repeat", type=int, default=1,
                            help="number of timed runs")

    op = sub.add_parser("oracle", help="run brute-force verification suites")
    op.add_argument("--seed", type=int, default=0)
    op.add_argument("--instances", type=int, default=25,
                    help="random instances per suite")
    return parser


def _read_config_file(path: str) -> dict[str, str]:
    text = Path(path).read_text()
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _apply_config(args: argparse.Namespace, parser_actions, config: dict[str, str]) -> None:
    """Fill parsed args from the config file wherever the command line left
    the default in place (explicit flags therefore win)."""
    by_dest = {a.dest: a for a in parser_actions}
    for key, raw in config.items():
        if key not in by_dest:
            raise ValidationError(f"unknown config key {key!r}")
        action = by_dest[key]
        if getattr(args, key) != action.default:
            continue  # explicitly set on the command line
        if action.type is not None:
            try:
                value = action.type(raw)
            except ValueError as exc:
                raise ValidationError(f"config key {key!r}: bad value {raw!r}") from exc
        elif isinstance(action, argparse._AppendAction):
            value = [v.strip() for v in raw.split(",")]
            for v in value:
                if action.choices and v not in action.choices:
                    raise ValidationError(f"config key {key!r}: bad value {v!r}")
        else:
            value = raw
        if action.choices and not isinstance(value, list) and value not in action.choices:
            raise ValidationError(f"config key {key!r}: bad value {raw!r}")
        setattr(args, key, value)


def _config_from_args(args: argparse.Namespace, analyze: bool) -> PipelineConfig:
    experiment = args.experiment
    if experiment is None:
        source = args.surface or args.graph or "run"
        experiment = Path(source).stem
    return PipelineConfig(
        surface_path=args.surface,
        blockers_path=args.blockers,
        graph_path=args.graph,
        weld_eps=args.weld_eps,
        plane_eps=args.plane_eps,
        terminals=args.terminals,
        metric=args.metric,
        k=args.k,
        interval=args.interval,
        radius=args.radius,
        ray_count=args.ray_count,
        sharpness_deg=args.sharpness_deg,
        exit_offset=args.exit_offset,
        normal_tol_deg=args.normal_tol_deg,
        los_height_tol=args.los_height_tol,
        root_metric=args.root_metric,
        centrality_weights=args.centrality_weights,
        katz_alpha=args.katz_alpha,
        density_buckets=args.density_buckets,
        analyze=analyze,
        seed=args.seed,
        experiment=experiment,
    )


_STRUCTURE_NAMES = {"json": "structure.json", "dot": "structure.dot", "obj": "overlay.obj"}


def _run_pipeline_command(args: argparse.Namespace, analyze: bool) -> int:
    cfg = _config_from_args(args, analyze)
    result = run_extract(cfg)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    formats = args.format or ["json"]
    for fmt in formats:
        export_structure(result.forest, fmt, out_dir / _STRUCTURE_NAMES[fmt])
    report_dict = report_to_dict(result.report)
    (out_dir / "report.json").write_text(canonical_json(report_dict) + "\n")
    (out_dir / "report.txt").write_text(render_report_text(result.report))
    log.info(
        "wrote %s (%d trees, %d nodes)",
        out_dir, len(result.forest), sum(t.size() for t in result.forest),
    )
    return EXIT_OK


def _run_bench(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args, analyze=True)
    for run in range(max(1, args.repeat)):
        result = run_extract(cfg)
        sys.stdout.write(render_report_text(result.report))
        if run + 1 < args.repeat:
            sys.stdout.write("\n")
    return EXIT_OK


def _run_oracle(args: argparse.Namespace) -> int:
    from .oracles import run_oracle_suites

    results = run_oracle_suites(seed=args.seed, instances=args.instances)
    all_ok = True
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        sys.stdout.write(f"oracle {name}: {status} ({detail})\n")
        all_ok &= ok
    return EXIT_OK if all_ok else 1


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            config = _read_config_file(args.config)
            sub_actions = [
                a
                for sp in parser._subparsers._group_actions
                for a in sp.choices[args.command]._actions
                if hasattr(a, "dest")
            ]
            _apply_config(args, sub_actions, config)
        if args.command == "extract":
            return _run_pipeline_command(args, analyze=False)
        if args.command == "analyze":
            return _run_pipeline_command(args, analyze=True)
        if args.command == "bench":
            return _run_bench(args)
        if args.command == "oracle":
            return _run_oracle(args)
        raise ValidationError(f"unknown command {args.command!r}")
    except (DisconnectedTerminals, NoPath) as exc:
        log.error("%s", exc)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DISCONNECTED
    except (ParseError, ValidationError, EmptyTerminalSet) as exc:
        log.error("%s", exc)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except NavStructError as exc:
        log.error("%s", exc)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        log.error("%s", exc)
        sys.stderr.write(f"i/o error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
