"""Invariant audits, at two depths.

`check_step` inspects a live World after every transition (the engine calls
it when constructed with validate=True) and knows about engine-side state
the trace never records: flow links, the first-entry forest, who follows
whom.  `check_trace` audits a finished trace: it replays the rows against
the engine's ground rules, then checks the per-strategy properties that are
visible in positions and role labels alone.  Both raise InvariantViolation
with the timestep and the offending pixels spelled out.
"""
from __future__ import annotations

from typing import Dict, List, Optional, Set, Tuple

from .grid import Pixel, l1, move
from .kernel import Role, World, left_side
from .trace import Trace, replay


class InvariantViolation(AssertionError):
    pass


def _fail(t: int, msg: str) -> None:
    raise InvariantViolation(f"t={t}: {msg}")


# ---------- live-world checks ----------


def check_step(world: World) -> None:
    t = world.t
    env = world.env
    if len(world.occupancy) != len(world.robots):
        _fail(t, "occupancy table and robot table disagree")
    for rid, r in world.robots.items():
        if world.occupancy.get(r.pos) != rid:
            _fail(t, f"robot {rid} thinks it is at {r.pos}, occupancy disagrees")
        if r.pos not in env.free:
            _fail(t, f"robot {rid} stands outside the region at {r.pos}")
    for door in env.doors:
        if door not in world.occupancy:
            _fail(t, f"door {door} unoccupied")
    for p in world.occupancy:
        if p not in world.visited:
            _fail(t, f"occupied pixel {p} not marked visited")
    _check_forest(world)
    name = world.strategy.name
    if name == "dflf":
        _check_dflf_step(world)
    elif name == "bflf":
        _check_bflf_step(world)
    elif name == "lflf":
        _check_lflf_step(world)


def _check_forest(world: World) -> None:
    """The first-entry record is a forest over exactly the visited pixels,
    rooted at the doors."""
    t = world.t
    tp = world.tree_parent
    if set(tp) != world.visited:
        _fail(t, "first-entry forest does not span the visited set")
    depth: Dict[Pixel, int] = {}
    for p in tp:
        chain = []
        q: Optional[Pixel] = p
        while q is not None and q not in depth:
            chain.append(q)
            if len(chain) > len(tp):
                _fail(t, f"first-entry forest has a cycle through {p}")
            q = tp[q]
            if q is not None and q not in tp:
                _fail(t, f"parent {q} of {chain[-1]} is unvisited")
        base = 0 if q is None else depth[q]
        for node in reversed(chain):
            base += 1
            depth[node] = base
    for root in (p for p, par in tp.items() if par is None):
        if root not in world.env.door_set:
            _fail(t, f"forest root {root} is not a door")


def _check_dflf_step(world: World) -> None:
    t = world.t
    leaders = sum(1 for r in world.robots.values() if r.role is Role.LEADER)
    if world.halted:
        if leaders:
            _fail(t, f"{leaders} leaders survive the halt")
    elif leaders != 1:
        _fail(t, f"{leaders} leaders; depth-first dispersal keeps exactly one")
    for rid, pid in world.pred_robot.items():
        r = world.robots.get(rid)
        p = world.robots.get(pid)
        if r is None or p is None or r.role is Role.STOPPED or p.role is Role.STOPPED:
            continue
        if l1(r.pos, p.pos) > 2:
            _fail(t, f"robot {rid} trails its predecessor {pid} by more than 2")


def _check_bflf_step(world: World) -> None:
    t = world.t
    tp = world.tree_parent
    occ = world.occupancy
    for p, rid in occ.items():
        parent = tp.get(p)
        if parent is None or tp.get(parent) is None:
            continue  # roots (doors) are exempt: the door is always occupied
        if parent in occ and world.robots[rid].role is not Role.STOPPED:
            _fail(
                t,
                f"live robot at {p} while its parent {parent} is occupied"
                " (nonblocking property)",
            )
    children: Dict[Pixel, List[Pixel]] = {}
    for p, parent in tp.items():
        if parent is not None:
            children.setdefault(parent, []).append(p)
    # kin occupancy is recorded, not enforced: at a pixel whose branches
    # split three or more ways, round-robin feeding leaves every chain
    # unattended two steps out of three, so one-step windows where parent,
    # grandparent, and uncles are all empty occur by construction
    for p in occ:
        parent = tp.get(p)
        if parent is None:
            continue
        grand = tp.get(parent)
        if parent in occ or (grand is not None and grand in occ):
            continue
        uncles = [u for u in children.get(grand, []) if u != parent] if grand else []
        if not any(u in occ for u in uncles):
            world.audit_notes.append(
                f"t={t}: occupied {p}: parent, grandparent, and uncles all empty"
            )
    # reachability bound: a live robot always has company within the
    # communication radius, so hand-offs and lead passing never strand
    if len(world.robots) > 1:
        for rid2, r2 in world.robots.items():
            if r2.role is Role.STOPPED:
                continue
            near = min(
                l1(r2.pos, o.pos) for o in world.robots.values() if o is not r2
            )
            if near > 3:
                _fail(t, f"robot {rid2} at {r2.pos} is {near} from the nearest robot")
    for w in world.warnings:
        if "dropped" in w:
            _fail(t, f"a hand-off went undelivered: {w}")


def _check_lflf_step(world: World) -> None:
    t = world.t
    leaders = sum(1 for r in world.robots.values() if r.role is Role.LEADER)
    active = world._active_doors()
    if leaders != active:
        _fail(t, f"{leaders} leaders but {active} active doors")
    for door in world.env.doors:
        if world.succ.get(door) is not None:
            _fail(t, f"door {door} grew a successor link")
    for p in world.inactive:
        if p in world.visited and p not in world.occupancy:
            _fail(t, f"inactive pixel {p} is unoccupied; retired pixels hold a robot")
    for door in world.env.doors:
        if door in world.inactive:
            continue
        seen: Set[Pixel] = set()
        u = door
        while True:
            if u in seen:
                _fail(t, f"flow line from {door} revisits {u}")
            seen.add(u)
            out = world.pred.get(u)
            if out is None:
                break  # the tip: a leader pixel
            incoming = world.succ.get(u)
            if u != door and incoming is not None:
                for d in left_side(incoming, out):
                    q = move(u, d)
                    if q in world.env.free and q not in world.visited:
                        _fail(
                            t,
                            f"unvisited {q} sits on the left side of the flow"
                            f" through {u}",
                        )
            u = move(u, out)
            if u not in world.visited:
                _fail(t, f"flow line from {door} leaves the visited region at {u}")


# ---------- trace checks ----------


def check_trace(tr: Trace) -> None:
    occupancies = replay(tr)
    if tr.strategy == "dflf":
        _check_dflf_trace(tr, occupancies)
    elif tr.strategy == "bflf":
        _check_bflf_trace(tr, occupancies)
    elif tr.strategy == "lflf":
        _check_lflf_trace(tr)


def _check_dflf_trace(tr: Trace, occupancies: List[Dict[Pixel, int]]) -> None:
    for t, rows in enumerate(tr.steps):
        leaders = sum(1 for _, _, _, role in rows if role == "leader")
        halted = tr.halt_time is not None and t >= tr.halt_time
        want = 0 if halted else 1
        if leaders != want:
            _fail(t, f"{leaders} leader labels, expected {want}")
    # occupancy timelines: every mid-life gap lasts exactly one step
    first: Dict[Pixel, int] = {}
    last: Dict[Pixel, int] = {}
    when: Dict[Pixel, Set[int]] = {}
    for t, occ in enumerate(occupancies):
        for p in occ:
            first.setdefault(p, t)
            last[p] = t
            when.setdefault(p, set()).add(t)
    for p, ts in when.items():
        gap = 0
        for t in range(first[p], last[p] + 1):
            if t in ts:
                if gap > 1:
                    _fail(t, f"pixel {p} sat empty for {gap} consecutive steps")
                gap = 0
            else:
                gap += 1


def _check_bflf_trace(tr: Trace, occupancies: List[Dict[Pixel, int]]) -> None:
    area = tr.env.area
    if tr.halt_time is not None:
        if tr.halt_time > 2 * area - 1:
            _fail(tr.halt_time, f"halt beyond the 2A-1 bound (A={area})")
        if len(occupancies[-1]) != area:
            _fail(tr.halt_time, "halted without filling the region")
    if tr.fill_time is None:
        return
    seen: Set[int] = set()
    births: List[int] = []
    for rows in tr.steps:
        fresh = sum(1 for rid, _, _, _ in rows if rid not in seen)
        seen.update(rid for rid, _, _, _ in rows)
        births.append(fresh)
    for t in range(tr.fill_time):
        if births[t] == 0 and (t + 1 >= len(births) or births[t + 1] == 0):
            _fail(t, "no robot materialized at t or t+1 before fill")


def _check_lflf_trace(tr: Trace) -> None:
    doors = tr.env.door_set
    for t, rows in enumerate(tr.steps):
        leaders = sum(1 for _, _, _, role in rows if role == "leader")
        active = sum(1 for _, i, j, role in rows if (i, j) in doors and role != "stopped")
        if leaders != active:
            _fail(t, f"{leaders} leader labels but {active} live door robots")
    counts: Dict[Pixel, int] = {}
    for s in tr.splices:
        counts[s.tip] = counts.get(s.tip, 0) + 1
    worst = max(counts.values(), default=0)
    if worst > 4:
        _fail(0, f"a pixel initiated {worst} splices; expected a small constant")


def audited_run(env, strategy, mask_seed: int = 0, max_steps: Optional[int] = None) -> World:
    """Run with per-step checks on, then audit the trace too."""
    from . import trace as trace_module

    world = World(env, strategy, mask_seed=mask_seed, validate=True)
    world.run(max_steps)
    check_trace(trace_module.from_world(world))
    return world
