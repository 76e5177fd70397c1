"""Command-line surface: scenario generation, template search, scheduling,
and benchmark sweeps.

Every command writes a run manifest next to its outputs with the resolved
options, seeds, tool version, and a timestamp; rerunning with the same
manifest reproduces every result column except wall-clock times. CSV
headers are documented in docs/csv_formats.md. Exit codes: 0 success,
1 internal/result-level failure, 2 bad input or spec.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import (
    InstanceTooLarge,
    NoFeasibleSchedule,
    ParseError,
    SchemaVersionMismatch,
    UnsatisfiableSpec,
    VcschedError,
)
from .scenario import GenSpec, TASK_SHAPES, generate, load, save
from .scheduler import POWER_METHODS, run_method
from .search import (
    RSA_ITERATION_PRESETS,
    build_sequence,
    enumerate_templates,
    exhaustive_search,
    random_search,
    templates_to_text,
)

ENV_CONFIG = "VCSCHED_CONFIG"

SEARCH_STATS_HEADER = ["method", "templates_count", "wall_time_s"]
SCHEDULE_SUMMARY_HEADER = [
    "method", "p", "templates_total", "templates_feasible", "objective",
    "time_term", "energy_term", "exchange_term", "wall_time_s",
]
SCHEDULE_SCORES_HEADER = ["template_id", "p", "feasible", "objective", "failure_reason", "template"]
PSWEEP_HEADER = ["template_id", "p", "objective"]
BENCH_HEADER = ["axis", "axis_value", "method", "templates_count", "objective", "wall_time_s"]


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _write_manifest(path: Path, command: str, options: dict, seeds: dict) -> None:
    doc = {
        "command": command,
        "options": options,
        "seeds": seeds,
        "version": __version__,
        "timestamp": _now(),
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def _genspec_from_args(args) -> GenSpec:
    return GenSpec(
        sp_count=args.sp_count,
        vm_total=args.vm_total,
        vc_edge_count=args.vc_edges,
        uav_count=args.uav_count,
        task_shapes=tuple(args.tasks.split(",")),
        d_interval=(args.d_min, args.d_max),
        q_interval=(args.q_min, args.q_max),
        n0_interval=(args.n0_min, args.n0_max),
        b_interval=(args.b_min, args.b_max),
        wu_interval=(args.wu_min, args.wu_max),
        texec_interval=(args.texec_min, args.texec_max),
        ws_interval=(args.ws_min, args.ws_max),
        space=tuple(float(x) for x in args.space.split(",")),
        v2v_radius=args.v2v_radius,
        uav_radius=args.uav_radius,
    )


def cmd_generate(args) -> int:
    spec = _genspec_from_args(args)
    scenario = generate(spec, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save(scenario, out)
    _write_manifest(
        out.with_name(out.name + ".manifest.json"),
        "generate",
        dataclasses.asdict(spec),
        {"seed": args.seed},
    )
    print(f"wrote {out} ({spec.sp_count} SPs, {spec.uav_count} UAVs)")
    return 0


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------

def cmd_search(args) -> int:
    scenario = load(args.scenario)
    t0 = time.perf_counter()
    if args.method == "proposed":
        sequence = build_sequence(scenario.tasks)
        templates = enumerate_templates(scenario, sequence, limit=args.limit)
    elif args.method == "esa":
        templates = exhaustive_search(scenario)
    elif args.method == "rsa":
        templates = random_search(scenario, args.iters, args.seed)
    else:
        raise UnsatisfiableSpec(f"unknown search method {args.method!r}")
    wall = time.perf_counter() - t0

    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    Path(str(prefix) + ".templates.txt").write_text(
        templates_to_text(templates), encoding="utf-8"
    )
    _write_csv(
        Path(str(prefix) + ".stats.csv"),
        SEARCH_STATS_HEADER,
        [[args.method, len(templates), _fmt(wall)]],
    )
    _write_manifest(
        Path(str(prefix) + ".manifest.json"),
        "search",
        {
            "scenario": str(args.scenario),
            "method": args.method,
            "iters": args.iters,
            "limit": args.limit,
        },
        {"seed": args.seed, "scenario_seed": scenario.seed},
    )
    print(f"{args.method}: {len(templates)} templates in {wall:.3f}s")
    return 0


# ---------------------------------------------------------------------------
# schedule
# ---------------------------------------------------------------------------

def cmd_schedule(args) -> int:
    scenario = load(args.scenario)
    p_values = [int(x) for x in str(args.p).split(",")]
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)

    summary_rows = []
    score_rows = []
    psweep_rows = []
    best_overall = None
    failed = False
    for p in p_values:
        config = dataclasses.replace(scenario.config, p=p)
        t0 = time.perf_counter()
        try:
            result = run_method(
                scenario, args.method, config,
                base_seed=args.seed, limit=args.limit, jobs=args.jobs,
            )
            wall = time.perf_counter() - t0
            b = result.breakdown
            summary_rows.append([
                args.method, p, result.stats.templates_enumerated,
                result.stats.templates_feasible, _fmt(b.total), _fmt(b.time_term),
                _fmt(b.energy_term), _fmt(b.exchange_term), _fmt(wall),
            ])
            log = result.score_log
            if best_overall is None or b.total < best_overall[0]:
                best_overall = (b.total, result)
        except NoFeasibleSchedule as exc:
            wall = time.perf_counter() - t0
            failed = True
            summary_rows.append([
                args.method, p, len(exc.score_log),
                0, "", "", "", "", _fmt(wall),
            ])
            log = exc.score_log
        for idx, entry in enumerate(log):
            score_rows.append([
                idx, p, int(entry.feasible),
                _fmt(entry.breakdown.total if entry.breakdown else None),
                entry.failure_reason or "", entry.template.canonical_line(),
            ])
            if entry.feasible:
                psweep_rows.append([idx, p, _fmt(entry.breakdown.total)])

    _write_csv(Path(str(prefix) + ".summary.csv"), SCHEDULE_SUMMARY_HEADER, summary_rows)
    _write_csv(Path(str(prefix) + ".scores.csv"), SCHEDULE_SCORES_HEADER, score_rows)
    if len(p_values) > 1:
        _write_csv(Path(str(prefix) + ".psweep.csv"), PSWEEP_HEADER, psweep_rows)
    if best_overall is not None:
        Path(str(prefix) + ".template.txt").write_text(
            best_overall[1].template.canonical_line() + "\n", encoding="utf-8"
        )
    _write_manifest(
        Path(str(prefix) + ".manifest.json"),
        "schedule",
        {
            "scenario": str(args.scenario),
            "method": args.method,
            "p": p_values,
            "limit": args.limit,
            "jobs": args.jobs,
        },
        {"seed": args.seed, "scenario_seed": scenario.seed},
    )
    if failed:
        print("no feasible schedule for at least one p; see scores CSV", file=sys.stderr)
        return 1
    print(
        f"best objective {best_overall[0]:.6g} "
        f"({best_overall[1].stats.templates_feasible} feasible templates)"
    )
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def _bench_cell(spec: GenSpec, seeds, method: str, limit, jobs) -> tuple[float, float | None, float]:
    """Mean templates count, mean objective over feasible seeds, mean wall."""
    counts, objectives, walls = [], [], []
    for seed in seeds:
        scenario = generate(spec, seed)
        t0 = time.perf_counter()
        try:
            result = run_method(scenario, method, limit=limit, jobs=jobs)
            objectives.append(result.breakdown.total)
            counts.append(result.stats.templates_enumerated)
        except NoFeasibleSchedule as exc:
            counts.append(len(exc.score_log))
        walls.append(time.perf_counter() - t0)
    mean_obj = sum(objectives) / len(objectives) if objectives else None
    return sum(counts) / len(counts), mean_obj, sum(walls) / len(walls)


def cmd_bench(args) -> int:
    try:
        sweep = json.loads(Path(args.sweep).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{args.sweep}: {exc.msg} (line {exc.lineno})") from exc
    base = sweep.get("base", {})
    if "task_shapes" in base:
        base["task_shapes"] = tuple(base["task_shapes"])
    axes = sweep.get("axes", [])
    if not axes:
        raise UnsatisfiableSpec("sweep file declares no axes")
    seeds = sweep.get("seeds", [0])
    methods = sweep.get("methods", ["proposed"])
    limit = sweep.get("limit")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    for axis in axes:
        name, values = axis["name"], axis["values"]
        rows = []
        for value in values:
            spec_kwargs = dict(base)
            spec_kwargs[name] = tuple(value) if isinstance(value, list) else value
            spec = GenSpec(**spec_kwargs)
            for method in methods:
                count, obj, wall = _bench_cell(spec, seeds, method, limit, args.jobs)
                rows.append([name, value, method, _fmt(count), _fmt(obj), _fmt(wall)])
        _write_csv(out_dir / f"{name}.csv", BENCH_HEADER, rows)
    _write_manifest(
        out_dir / "manifest.json",
        "bench",
        {"sweep": str(args.sweep), "jobs": args.jobs, "resolved": sweep},
        {"seeds": seeds},
    )
    print(f"wrote {len(axes)} sweep CSV(s) to {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vcsched",
        description="Graph-task scheduling over a vehicular cloud",
    )
    parser.add_argument("--version", action="version", version=f"vcsched {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="draw a random scenario file")
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--sp-count", type=int, default=7)
    g.add_argument("--vm-total", type=int, default=12)
    g.add_argument("--vc-edges", type=int, default=None)
    g.add_argument("--uav-count", type=int, default=2)
    g.add_argument("--tasks", default="star-4,ring-5",
                   help=f"comma list of shapes: {','.join(sorted(TASK_SHAPES))}")
    g.add_argument("--d-min", type=float, default=5.0e5)
    g.add_argument("--d-max", type=float, default=6.0e5)
    g.add_argument("--q-min", type=float, default=1.5)
    g.add_argument("--q-max", type=float, default=2.0)
    g.add_argument("--n0-min", type=float, default=4.0e-3)
    g.add_argument("--n0-max", type=float, default=5.0e-3)
    g.add_argument("--b-min", type=float, default=1.0e7)
    g.add_argument("--b-max", type=float, default=1.2e7)
    g.add_argument("--wu-min", type=float, default=0.1)
    g.add_argument("--wu-max", type=float, default=0.3)
    g.add_argument("--texec-min", type=float, default=0.1)
    g.add_argument("--texec-max", type=float, default=0.2)
    g.add_argument("--ws-min", type=float, default=0.05)
    g.add_argument("--ws-max", type=float, default=0.06)
    g.add_argument("--space", default="1000,1000,100")
    g.add_argument("--v2v-radius", type=float, default=300.0)
    g.add_argument("--uav-radius", type=float, default=500.0)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("search", help="enumerate templates")
    s.add_argument("scenario")
    s.add_argument("--method", choices=["proposed", "esa", "rsa"], default="proposed")
    s.add_argument("--iters", type=int, default=RSA_ITERATION_PRESETS[0])
    s.add_argument("--limit", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_search)

    c = sub.add_parser("schedule", help="run the full two-stage scheduler")
    c.add_argument("scenario")
    c.add_argument("--method", choices=list(POWER_METHODS), default="proposed")
    c.add_argument("--p", default="3", help="norm order, or comma list for a sweep")
    c.add_argument("--limit", type=int, default=None)
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_schedule)

    b = sub.add_parser("bench", help="run a sweep file into per-axis CSVs")
    b.add_argument("sweep")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)

    env_path = os.environ.get(ENV_CONFIG)
    if env_path:
        try:
            defaults = json.loads(Path(env_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"{ENV_CONFIG}={env_path}: {exc}")
        allowed = {"p", "jobs", "method", "seed"}
        for target in (g, s, c, b):
            target.set_defaults(
                **{k: v for k, v in defaults.items() if k in allowed}
            )
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UnsatisfiableSpec, ParseError, SchemaVersionMismatch, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (VcschedError, InstanceTooLarge) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
