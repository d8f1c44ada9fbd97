"""Command-line entry point.

Subcommands:
  simulate  run a world from a config and write trace/metrics/manifest files
  dream     replay dream generation from a stored percept log
  optimize  run the genetic search over agent hyperparameters
  metrics   recompute the summary from an existing trace.csv

Exit codes: 0 on success, 1 on config or runtime validation failures (the
message names the offending key), 2 on unknown flags or subcommands (argparse
prints usage).
"""

from __future__ import annotations

import argparse
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .configio import ConfigBundle, parse_config
from .dreams import dream
from .errors import ConfigError, SimulatorError
from .fields import GridCell
from .optimizer import evolve
from .seeds import derive_seed, make_rng
from .semantics import Percept, PerceptStore, load_graph
from .traceio import (
    atomic_write_text,
    read_percepts_csv,
    read_trace_csv,
    standalone_dream_rows,
    summarize_rows,
    write_dreams_csv,
    write_interactions_csv,
    write_manifest,
    write_metrics_csv,
    write_percepts_csv,
    write_trace_csv,
)
from .world import metrics as world_metrics
from .world import run as run_world


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conscient-sim",
        description="Deterministic multi-agent simulator with dreams, emotions, "
        "and a genetic outer loop.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a simulation and write its trace")
    sim.add_argument("--config", required=True, help="flat key=value config file")
    sim.add_argument("--seed", required=True, type=int, help="master seed (unsigned 64-bit)")
    sim.add_argument("--out", required=True, help="output directory")

    drm = sub.add_parser("dream", help="replay dreams from a percept log")
    drm.add_argument("--config", required=True, help="flat key=value config file")
    drm.add_argument("--percept-log", required=True, help="percepts.csv from a simulation")
    drm.add_argument("--out", required=True, help="output directory")

    opt = sub.add_parser("optimize", help="genetic search over agent parameters")
    opt.add_argument("--config", required=True, help="flat key=value config file")
    opt.add_argument("--seed", required=True, type=int, help="search seed")
    opt.add_argument("--out", required=True, help="output directory")

    met = sub.add_parser("metrics", help="summarize an existing trace")
    met.add_argument("--trace", required=True, help="path to trace.csv")
    return parser


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _manifest(command: str, args_dict: dict, bundle: ConfigBundle, started: str) -> dict:
    return {
        "command": command,
        "tool": "conscient-sim",
        "version": __version__,
        "arguments": args_dict,
        "master_seed": bundle.world.master_seed,
        "started_at": started,
        "finished_at": _now(),
        "effective_config": dict(bundle.effective),
    }


def _cmd_simulate(args) -> int:
    started = _now()
    bundle = parse_config(args.config, overrides={"world.master_seed": str(args.seed)})
    trace = run_world(bundle.world)
    summary = world_metrics(trace)
    os.makedirs(args.out, exist_ok=True)
    write_trace_csv(os.path.join(args.out, "trace.csv"), trace.rows)
    write_interactions_csv(os.path.join(args.out, "interactions.csv"), trace.interactions)
    write_dreams_csv(os.path.join(args.out, "dreams.csv"), trace.dream_rows)
    write_percepts_csv(os.path.join(args.out, "percepts.csv"), trace.percept_rows)
    write_metrics_csv(os.path.join(args.out, "metrics.csv"), summary)
    manifest = _manifest(
        "simulate",
        {"config": args.config, "seed": args.seed, "out": args.out},
        bundle,
        started,
    )
    manifest["outputs"] = [
        "trace.csv",
        "interactions.csv",
        "dreams.csv",
        "percepts.csv",
        "metrics.csv",
    ]
    write_manifest(os.path.join(args.out, "manifest.json"), manifest)
    print(
        f"simulated {bundle.world.total_ticks} ticks, {bundle.world.n_agents} agents: "
        f"{summary.interactions} interactions, {summary.photos} photos, "
        f"{summary.dream_frames} dream frames -> {args.out}"
    )
    return 0


def _cmd_dream(args) -> int:
    started = _now()
    bundle = parse_config(args.config)
    world_cfg = bundle.world
    content_graph = load_graph(
        world_cfg.content_edges,
        derive_seed(world_cfg.master_seed, "content-graph"),
        world_cfg.feature_dim,
    )
    style_graph = load_graph(
        world_cfg.style_edges,
        derive_seed(world_cfg.master_seed, "style-graph"),
        world_cfg.feature_dim,
    )
    content_store = PerceptStore()
    style_store = PerceptStore()
    for row in read_percepts_csv(args.percept_log):
        graph = style_graph if row.kind == "style" else content_graph
        if not graph.has_node(row.category):
            raise ConfigError(
                f"percept {row.id}: category {row.category!r} not in the "
                f"{'style' if row.kind == 'style' else 'content'} graph"
            )
        percept = Percept(
            id=row.id,
            features=row.features,
            category=row.category,
            origin=GridCell(row.i, row.j),
            tick=row.tick,
            kind=row.kind,
        )
        (style_store if row.kind == "style" else content_store).attach(percept)
    rng = make_rng(derive_seed(world_cfg.master_seed, "dream-cli"))
    result = dream(
        content_store, content_graph, style_store, style_graph, world_cfg.agent.dream, rng
    )
    os.makedirs(args.out, exist_ok=True)
    write_dreams_csv(
        os.path.join(args.out, "dreams.csv"), standalone_dream_rows(result.frames)
    )
    manifest = _manifest(
        "dream",
        {"config": args.config, "percept_log": args.percept_log, "out": args.out},
        bundle,
        started,
    )
    manifest["outputs"] = ["dreams.csv"]
    write_manifest(os.path.join(args.out, "manifest.json"), manifest)
    print(f"dreamed {len(result.frames)} frames -> {args.out}")
    return 0


def _cmd_optimize(args) -> int:
    started = _now()
    bundle = parse_config(args.config)
    best, history = evolve(bundle.ga, bundle.world, seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    lines = ["generation,best_fitness,mean_fitness,best_genome"]
    for h in history:
        genome = ";".join(repr(float(g)) for g in h.best_genome)
        lines.append(f"{h.generation},{repr(h.best_fitness)},{repr(h.mean_fitness)},{genome}")
    atomic_write_text(os.path.join(args.out, "ga_history.csv"), "\n".join(lines) + "\n")
    manifest = _manifest(
        "optimize",
        {"config": args.config, "seed": args.seed, "out": args.out},
        bundle,
        started,
    )
    manifest["master_seed"] = args.seed
    manifest["outputs"] = ["ga_history.csv"]
    manifest["results"] = {
        "best_fitness": best.fitness,
        "best_mean_interactions": best.mean_interactions,
        "best_generation": best.generation,
        "best_genome": [float(g) for g in best.genome.genes],
    }
    write_manifest(os.path.join(args.out, "manifest.json"), manifest)
    print(
        f"optimized {bundle.ga.generations} generations of {bundle.ga.population_size}: "
        f"best fitness {best.fitness} -> {args.out}"
    )
    return 0


def _cmd_metrics(args) -> int:
    rows = read_trace_csv(args.trace)
    summary = summarize_rows(rows)
    for key, value in summary.items():
        print(f"{key} = {value}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "dream": _cmd_dream,
    "optimize": _cmd_optimize,
    "metrics": _cmd_metrics,
}


def run_command(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage/help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except SimulatorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
