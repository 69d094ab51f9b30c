"""Command line front end: simulate, gen, bench, render, oracle, verify.

Exit codes are part of the interface and stay fixed: 0 for success (a run
that fills the region counts as success even if rendering is skipped), 2
for a simulation that hit its step budget before filling, 1 for everything
else (bad arguments, unreadable maps, corrupt traces, failed audits).
Identical invocations produce byte-identical outputs; nothing here consults
a clock, a locale, or an unseeded random source.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import render as render_mod
from . import trace as trace_mod
from .grid import (
    Environment,
    MapError,
    gen_corridor,
    gen_hard_family,
    gen_maze,
    gen_rect,
    gen_square,
    parse_map,
    render_map,
)
from .kernel import World
from .metrics import compute_metrics, count_splicings, lower_bound
from .oracle import SizeCapExceeded, oracle_opt_schedule
from .strategies import STRATEGIES, get_strategy
from .verify import InvariantViolation, check_trace

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TIMEOUT = 2

BENCH_FORMAT = "swarmfill-bench v1"
BENCH_COLUMNS = (
    "strategy,A,k,fill_time,halt_time,LB,ratio,"
    "tree_depth,avg_travel,avg_ratio,max_splice_count"
)


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    """Everything one simulate invocation needs, resolved and validated."""

    env: Environment
    strategy_name: str
    sensor_radius: int
    memory_depth: int
    max_steps: Optional[int]
    trace_out: str
    metrics_out: str
    frames_out: Optional[str]


# ---------- generator mini-language ----------


def parse_gen_spec(spec: str) -> Environment:
    """family:params in one flag: corridor:A, square:N, rect:WxH:dI,J[:dI,J...],
    maze:W:H:AREA:DOORS[:SEED], hard:K."""
    head, _, rest = spec.partition(":")
    try:
        if head == "corridor":
            return gen_corridor(int(rest))
        if head == "square":
            return gen_square(int(rest))
        if head == "hard":
            return gen_hard_family(int(rest))
        if head == "rect":
            parts = rest.split(":")
            w, _, h = parts[0].partition("x")
            doors = []
            for part in parts[1:]:
                if not part.startswith("d"):
                    raise CliError(f"rect door spec must look like d0,0 (got {part!r})")
                a, _, b = part[1:].partition(",")
                doors.append((int(a), int(b)))
            if not doors:
                raise CliError("rect spec needs at least one door (rect:WxH:dI,J)")
            return gen_rect(int(w), int(h), doors)
        if head == "maze":
            parts = [int(x) for x in rest.split(":")]
            if len(parts) == 4:
                parts.append(0)
            if len(parts) != 5:
                raise CliError("maze spec is maze:W:H:AREA:DOORS[:SEED]")
            return gen_maze(*parts)
    except ValueError as e:
        raise CliError(f"bad generator spec {spec!r}: {e}") from None
    raise CliError(
        f"unknown generator family {head!r} "
        "(choose corridor, square, rect, maze, or hard)"
    )


def _load_env(args) -> Environment:
    if getattr(args, "map", None):
        with open(args.map) as fh:
            return parse_map(fh.read())
    if getattr(args, "gen", None):
        return parse_gen_spec(args.gen)
    raise CliError("give an environment with --map PATH or --gen SPEC")


def _int_list(text: str) -> List[int]:
    """Comma list where each item is an int or an inclusive a..b range."""
    out: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, _, b = part.partition("..")
            lo, hi = int(a), int(b)
            if hi < lo:
                raise CliError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise CliError(f"no sizes in {text!r}")
    return out


# ---------- simulate ----------


def _resolve_run_config(args) -> RunConfig:
    env = _load_env(args)
    name = args.strategy
    if name not in STRATEGIES:
        raise CliError(f"unknown strategy {name!r}; choose from {sorted(STRATEGIES)}")
    strat = get_strategy(name)
    rs = args.sensor_radius if args.sensor_radius is not None else strat.sensor_radius
    if rs < strat.sensor_radius:
        raise CliError(
            f"sensor radius {rs} is below the {name} minimum of {strat.sensor_radius}"
        )
    if args.memory_depth < 1:
        raise CliError("memory depth must be at least 1")
    cap = strat.max_doors
    if cap is not None and len(env.doors) > cap:
        raise CliError(f"{name} handles at most {cap} door(s); map has {len(env.doors)}")
    return RunConfig(
        env=env,
        strategy_name=name,
        sensor_radius=rs,
        memory_depth=args.memory_depth,
        max_steps=args.max_steps,
        trace_out=args.trace_out,
        metrics_out=args.metrics_out,
        frames_out=args.frames_out,
    )


def _metrics_json(tr: trace_mod.Trace, env: Environment) -> str:
    rec = compute_metrics(tr)
    lb = lower_bound(env)
    body: Dict[str, object] = {
        "area": env.area,
        "doors": len(env.doors),
        "strategy": tr.strategy,
        "sensor_radius": tr.sensor_radius,
        "comm_radius": tr.comm_radius,
        "memory_depth": tr.memory_depth,
        "lower_bound": lb,
        "timed_out": tr.timed_out,
    }
    for key, val in vars(rec).items():
        body[key] = str(val) if isinstance(val, Fraction) else val
    if rec.fill_time is not None and lb > 0:
        body["ratio"] = str(Fraction(rec.fill_time, lb))
    body["max_splice_count"] = _max_splice(tr)
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def _max_splice(tr: trace_mod.Trace) -> int:
    if tr.strategy != "lflf":
        return 0
    return max(count_splicings(tr).values(), default=0)


def cmd_simulate(args) -> int:
    cfg = _resolve_run_config(args)
    world = World(cfg.env, get_strategy(cfg.strategy_name))
    world.run(cfg.max_steps)
    tr = trace_mod.from_world(world)
    trace_mod.save(tr, cfg.trace_out)
    with open(cfg.metrics_out, "w") as fh:
        fh.write(_metrics_json(tr, cfg.env))
    if cfg.frames_out:
        render_mod.write_frames(render_mod.ascii_frames(tr), cfg.frames_out, "txt")
    print(
        f"strategy={cfg.strategy_name} area={cfg.env.area} doors={len(cfg.env.doors)}"
        f" fill_time={tr.fill_time} halt_time={tr.halt_time}"
        f" trace={cfg.trace_out} metrics={cfg.metrics_out}"
    )
    if tr.timed_out:
        print(f"timed out after {len(tr.steps) - 1} steps without filling", file=sys.stderr)
        return EXIT_TIMEOUT
    return EXIT_OK


# ---------- gen ----------


def cmd_gen(args) -> int:
    env = parse_gen_spec(args.spec)
    text = render_map(env)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {env.width}x{env.height} map (area {env.area}) to {args.out}")
    else:
        print(text)
    return EXIT_OK


# ---------- bench ----------


def _bench_env(family: str, size: int) -> Tuple[Environment, int]:
    """Environment plus the k column for one bench row."""
    if family == "corridor":
        return gen_corridor(size), 1
    if family == "square":
        return gen_square(size), 1
    if family == "hard":
        return gen_hard_family(size), size
    raise CliError(f"unknown family {family!r} (choose corridor, square, or hard)")


def _bench_row(task: Tuple[str, int, str]) -> str:
    family, size, strategy_name = task
    env, k = _bench_env(family, size)
    world = World(env, get_strategy(strategy_name))
    world.run()
    tr = trace_mod.from_world(world)
    rec = compute_metrics(tr)
    lb = lower_bound(env)
    ratio = Fraction(rec.fill_time, lb) if rec.fill_time is not None and lb else None
    splice = _max_splice(tr)

    def num(v) -> str:
        if v is None:
            return ""
        return format(float(v), ".6g") if isinstance(v, Fraction) else str(v)

    cells = (
        strategy_name,
        num(env.area),
        num(k),
        num(rec.fill_time),
        num(rec.halt_time),
        num(lb),
        num(ratio),
        num(rec.tree_depth),
        num(rec.avg_travel),
        num(rec.avg_ratio),
        num(splice),
    )
    return ",".join(cells)


def _read_config_file(path: str) -> Dict[str, str]:
    """Plain key=value lines; '#' starts a comment; keys match the flags."""
    allowed = {"family", "n", "k", "strategy", "out"}
    out: Dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if not eq or key not in allowed:
                raise CliError(f"{path}:{lineno}: expected key=value with key in {sorted(allowed)}")
            out[key] = val
    return out


def cmd_bench(args) -> int:
    merged: Dict[str, Optional[str]] = {
        "family": args.family,
        "n": args.n,
        "k": args.k,
        "strategy": args.strategy,
        "out": args.out,
    }
    if args.config:
        for key, val in _read_config_file(args.config).items():
            if merged.get(key) is None:
                merged[key] = val
    family = merged["family"]
    if not family:
        raise CliError("bench needs --family (corridor, square, or hard)")
    sizes_text = merged["k"] if family == "hard" else merged["n"]
    if not sizes_text:
        flag = "--k" if family == "hard" else "--n"
        raise CliError(f"bench --family {family} needs {flag} with a size list")
    sizes = _int_list(sizes_text)
    if not merged["strategy"]:
        raise CliError("bench needs --strategy (comma separated for several)")
    names = [s.strip() for s in merged["strategy"].split(",") if s.strip()]
    for name in names:
        if name not in STRATEGIES:
            raise CliError(f"unknown strategy {name!r}; choose from {sorted(STRATEGIES)}")
    tasks = [(family, size, name) for name in names for size in sizes]
    for fam, size, name in tasks:
        env, _ = _bench_env(fam, size)  # surface bad sizes before any run
        cap = get_strategy(name).max_doors
        if cap is not None and len(env.doors) > cap:
            raise CliError(
                f"{name} handles at most {cap} door(s); {fam}:{size} has {len(env.doors)}"
            )

    workers = int(os.environ.get("SWARMFILL_WORKERS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_row, tasks))
    else:
        rows = [_bench_row(t) for t in tasks]

    lines = [f"# {BENCH_FORMAT} columns={BENCH_COLUMNS}", BENCH_COLUMNS]
    lines.extend(rows)
    body = "\n".join(lines) + "\n"
    if merged["out"]:
        with open(merged["out"], "w") as fh:
            fh.write(body)
        print(f"wrote {len(rows)} rows to {merged['out']}")
    else:
        sys.stdout.write(body)
    return EXIT_OK


# ---------- render ----------


def cmd_render(args) -> int:
    tr = trace_mod.load(args.trace)
    frames = (
        render_mod.ascii_frames(tr)
        if args.format == "ascii"
        else render_mod.svg_frames(tr)
    )
    ext = "txt" if args.format == "ascii" else "svg"
    paths = render_mod.write_frames(frames, args.out, ext)
    print(f"wrote {len(paths)} {args.format} frames to {args.out}")
    return EXIT_OK


# ---------- oracle ----------


def cmd_oracle(args) -> int:
    env = _load_env(args)
    kwargs = {"cap": args.cap} if args.cap is not None else {}
    opt, schedule = oracle_opt_schedule(env, **kwargs)
    print(f"optimum={opt} area={env.area} doors={len(env.doors)}")
    for t, moves in enumerate(schedule, 1):
        step = " ".join(f"{a[0]},{a[1]}->{b[0]},{b[1]}" for a, b in moves)
        print(f"t={t}: {step}")
    return EXIT_OK


# ---------- verify ----------


def cmd_verify(args) -> int:
    tr = trace_mod.load(args.trace)
    check_trace(tr)
    print(
        f"ok: {len(tr.steps)} snapshots, strategy={tr.strategy},"
        f" fill_time={tr.fill_time}, halt_time={tr.halt_time}"
    )
    return EXIT_OK


# ---------- wiring ----------


def _add_env_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--map", help="path to a map text file")
    p.add_argument("--gen", help="generator spec, e.g. rect:4x4:d0,0")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="swarmfill",
        description="Deterministic swarm dispersion simulator for pixel grids.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one strategy on one map")
    _add_env_flags(p)
    p.add_argument("--strategy", required=True, help="dflf, bflf, or lflf")
    p.add_argument("--sensor-radius", type=int, default=None)
    p.add_argument("--memory-depth", type=int, default=1)
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--trace-out", default="trace.txt")
    p.add_argument("--metrics-out", default="metrics.json")
    p.add_argument("--frames-out", default=None, help="also write ascii frames here")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("gen", help="print or save a generated map")
    p.add_argument("spec", help="corridor:A, square:N, rect:WxH:dI,J, maze:W:H:AREA:DOORS[:SEED], hard:K")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("bench", help="sweep a family and emit CSV")
    p.add_argument("--family", default=None, help="corridor, square, or hard")
    p.add_argument("--n", default=None, help="sizes: 8,16,32 or 4..64")
    p.add_argument("--k", default=None, help="door counts for the hard family")
    p.add_argument("--strategy", default=None, help="comma separated strategy names")
    p.add_argument("--out", default=None, help="CSV path (stdout when omitted)")
    p.add_argument("--config", default=None, help="key=value file; flags win")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("render", help="export one frame per timestep of a trace")
    p.add_argument("trace")
    p.add_argument("--format", choices=("ascii", "svg"), default="ascii")
    p.add_argument("--out", default="frames")
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("oracle", help="exact optimum fill time by exhaustive search")
    _add_env_flags(p)
    p.add_argument("--cap", type=int, default=None, help="refuse areas above this")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("verify", help="run the invariant suite on a saved trace")
    p.add_argument("trace")
    p.set_defaults(fn=cmd_verify)

    return top


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, SizeCapExceeded, trace_mod.CorruptTrace, InvariantViolation) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except MapError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
