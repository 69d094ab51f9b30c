"""Line-based run records: write, read, and replay-validate.

A trace is a plain text file.  Comment lines carry the format version, the
environment (hash and embedded map rows), the strategy and its sensing
configuration, splice events, and the fill/halt trailer.  Every other line is
one robot observation, `t,robot_id,i,j,role`, sorted by (t, robot_id), so the
whole file is deterministic for a given run.

The strategy comment line is deliberately separate from the rest of the
header: two runs that differ only in which strategy produced them can be
compared by `payload`, which drops that one line.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .grid import Environment, Pixel, env_hash, parse_map, render_map

FORMAT = "swarmfill-trace v1"

Row = Tuple[int, int, int, str]  # rid, i, j, role label


class CorruptTrace(ValueError):
    """The trace is unparseable or describes an impossible run."""


@dataclass
class Splice:
    t: int
    tip: Pixel
    target: Pixel
    cut: Optional[Pixel]


@dataclass
class Trace:
    env: Environment
    strategy: str
    sensor_radius: int
    comm_radius: int
    memory_depth: int
    steps: List[List[Row]] = field(default_factory=list)
    splices: List[Splice] = field(default_factory=list)
    fill_time: Optional[int] = None
    halt_time: Optional[int] = None
    timed_out: bool = False

    @property
    def last_t(self) -> int:
        return len(self.steps) - 1

    def positions(self, t: int) -> Dict[Pixel, Tuple[int, str]]:
        """Pixel -> (rid, role) map for one timestep."""
        return {(i, j): (rid, role) for rid, i, j, role in self.steps[t]}


def from_world(world) -> Trace:
    """Snapshot a finished (or abandoned) run into a Trace."""
    strat = world.strategy
    tr = Trace(
        env=world.env,
        strategy=strat.name,
        sensor_radius=strat.sensor_radius,
        comm_radius=strat.comm_radius,
        memory_depth=1,
        steps=[list(snap) for snap in world.history],
        fill_time=world.fill_time,
        halt_time=world.halt_time,
        timed_out=world.timed_out,
    )
    tr.splices = [Splice(e.t, e.tip, e.target, e.cut) for e in world.splice_events]
    return tr


# ---------- serialization ----------


def _px(p: Pixel) -> str:
    return f"{p[0]},{p[1]}"


def dumps(tr: Trace) -> str:
    env = tr.env
    out = io.StringIO()
    out.write(
        f"# {FORMAT} env={env_hash(env)} area={env.area} doors={len(env.doors)}"
        f" w={env.width} h={env.height}\n"
    )
    out.write(
        f"# strategy={tr.strategy} rs={tr.sensor_radius}"
        f" rc={tr.comm_radius} T={tr.memory_depth}\n"
    )
    for line in render_map(env).splitlines():
        out.write(f"# map {line}\n")
    for t, rows in enumerate(tr.steps):
        for rid, i, j, role in sorted(rows):
            out.write(f"{t},{rid},{i},{j},{role}\n")
    for s in tr.splices:
        cut = _px(s.cut) if s.cut is not None else "-"
        out.write(f"# splice t={s.t} tip={_px(s.tip)} target={_px(s.target)} cut={cut}\n")
    if tr.fill_time is not None:
        out.write(f"# fill_time={tr.fill_time}\n")
    if tr.halt_time is not None:
        out.write(f"# halt_time={tr.halt_time}\n")
    if tr.timed_out:
        out.write("# timed_out\n")
    return out.getvalue()


def payload(text: str) -> str:
    """The strategy-independent portion, for cross-strategy byte comparison."""
    keep = [ln for ln in text.splitlines() if not ln.startswith("# strategy=")]
    return "\n".join(keep) + "\n"


def _parse_pixel(s: str) -> Optional[Pixel]:
    if s == "-":
        return None
    a, b = s.split(",")
    return (int(a), int(b))


def loads(text: str) -> Trace:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(f"# {FORMAT} "):
        raise CorruptTrace("missing or unrecognized header line")
    strategy = ""
    rs = rc = depth = 0
    map_rows: List[str] = []
    steps: List[List[Row]] = []
    splices: List[Splice] = []
    fill_time: Optional[int] = None
    halt_time: Optional[int] = None
    timed_out = False
    try:
        for ln in lines[1:]:
            if ln.startswith("# strategy="):
                fields = dict(kv.split("=", 1) for kv in ln[2:].split())
                strategy = fields["strategy"]
                rs, rc = int(fields["rs"]), int(fields["rc"])
                depth = int(fields["T"])
            elif ln.startswith("# map "):
                map_rows.append(ln[len("# map "):])
            elif ln.startswith("# splice "):
                fields = dict(kv.split("=", 1) for kv in ln[len("# splice "):].split())
                splices.append(
                    Splice(
                        int(fields["t"]),
                        _parse_pixel(fields["tip"]),
                        _parse_pixel(fields["target"]),
                        _parse_pixel(fields["cut"]),
                    )
                )
            elif ln.startswith("# fill_time="):
                fill_time = int(ln.split("=", 1)[1])
            elif ln.startswith("# halt_time="):
                halt_time = int(ln.split("=", 1)[1])
            elif ln == "# timed_out":
                timed_out = True
            elif ln.startswith("#") or not ln.strip():
                continue
            else:
                t_s, rid_s, i_s, j_s, role = ln.split(",")
                t = int(t_s)
                if t == len(steps):
                    steps.append([])
                elif t != len(steps) - 1:
                    raise CorruptTrace(f"timestep {t} out of order")
                steps[t].append((int(rid_s), int(i_s), int(j_s), role))
    except (KeyError, ValueError, IndexError) as exc:
        if isinstance(exc, CorruptTrace):
            raise
        raise CorruptTrace(f"malformed line: {exc}") from exc
    if not map_rows:
        raise CorruptTrace("no embedded map")
    if not strategy:
        raise CorruptTrace("no strategy line")
    env = parse_map("\n".join(map_rows))
    tr = Trace(env, strategy, rs, rc, depth, steps, splices, fill_time, halt_time, timed_out)
    return tr


def save(tr: Trace, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(tr))


def load(path: str) -> Trace:
    with open(path) as fh:
        return loads(fh.read())


# ---------- replay validation ----------


def replay(tr: Trace) -> List[Dict[Pixel, int]]:
    """Re-walk the trace, checking the engine's ground rules at every step.

    Returns the occupancy map (pixel -> rid) per timestep.  Raises
    CorruptTrace on the first violation: double occupancy, robots off the
    region, an unoccupied door, a move longer than one pixel, a move into a
    pixel that was occupied at the previous step, a vanishing robot, a fresh
    robot anywhere but a door, or a stopped robot moving again.
    """
    env = tr.env
    if not tr.steps:
        raise CorruptTrace("empty trace")
    occupancies: List[Dict[Pixel, int]] = []
    prev_pos: Dict[int, Pixel] = {}
    stopped: Dict[int, Pixel] = {}
    for t, rows in enumerate(tr.steps):
        occ: Dict[Pixel, int] = {}
        pos: Dict[int, Pixel] = {}
        for rid, i, j, role in rows:
            p = (i, j)
            if p not in env.free:
                raise CorruptTrace(f"t={t}: robot {rid} at {p} outside the region")
            if p in occ:
                raise CorruptTrace(f"t={t}: robots {occ[p]} and {rid} share pixel {p}")
            if rid in pos:
                raise CorruptTrace(f"t={t}: robot {rid} listed twice")
            occ[p] = rid
            pos[rid] = p
            if role == "stopped":
                if rid in stopped and stopped[rid] != p:
                    raise CorruptTrace(f"t={t}: stopped robot {rid} moved")
                stopped[rid] = p
            elif rid in stopped:
                raise CorruptTrace(f"t={t}: robot {rid} un-stopped")
        for d in env.doors:
            if d not in occ:
                raise CorruptTrace(f"t={t}: door {d} unoccupied")
        if t > 0:
            before = occupancies[-1]
            for rid, p in pos.items():
                if rid not in prev_pos:
                    if p not in env.door_set:
                        raise CorruptTrace(f"t={t}: robot {rid} materialized off-door at {p}")
                    continue
                q = prev_pos[rid]
                if p == q:
                    continue
                if abs(p[0] - q[0]) + abs(p[1] - q[1]) != 1:
                    raise CorruptTrace(f"t={t}: robot {rid} jumped {q} -> {p}")
                if p in before:
                    raise CorruptTrace(
                        f"t={t}: robot {rid} entered {p} occupied the step before"
                    )
            for rid in prev_pos:
                if rid not in pos:
                    raise CorruptTrace(f"t={t}: robot {rid} vanished")
        occupancies.append(occ)
        prev_pos = pos
    if tr.fill_time is not None:
        first_full = next(
            (t for t, occ in enumerate(occupancies) if len(occ) == env.area), None
        )
        if first_full != tr.fill_time:
            raise CorruptTrace(
                f"fill_time trailer says {tr.fill_time}, rows say {first_full}"
            )
    return occupancies
