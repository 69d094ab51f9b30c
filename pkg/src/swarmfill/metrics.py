"""Run metrics, environment lower bounds, and competitive ratios.

Everything here is a pure function over a finished Trace or an Environment,
so results are exact: averages and ratios are `fractions.Fraction`, never
floats, and serialize as `p/q` strings.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .grid import Environment, InvalidParameter, Pixel, bfs_distances, l1
from .trace import Trace


@dataclass
class MetricsRecord:
    fill_time: Optional[int]
    halt_time: Optional[int]
    total_travel: int
    max_travel: int
    tree_depth: int
    avg_travel: Fraction
    avg_ratio: Fraction
    emission_series: List[int]
    active_door_series: List[int]

    def to_json(self) -> str:
        def enc(v):
            if isinstance(v, Fraction):
                return str(v)
            return v

        return json.dumps(
            {k: enc(v) for k, v in self.__dict__.items()}, sort_keys=True
        )


def compute_metrics(tr: Trace) -> MetricsRecord:
    """Distill one trace into the record above.

    Travel d_i counts a robot's position changes; displacement l_i is the L1
    distance from the pixel where the robot first appeared (its door) to its
    final pixel; the ratio rho_i = l_i/d_i is averaged over robots that
    moved at all.  Tree depth is the longest chain in the first-entry
    forest: when a pixel is occupied for the first time, its parent is the
    pixel its claimer came from.
    """
    births: Dict[int, Tuple[int, Pixel]] = {}
    final: Dict[int, Pixel] = {}
    travel: Dict[int, int] = {}
    parent: Dict[Pixel, Optional[Pixel]] = {}
    emission: List[int] = []
    active_doors: List[int] = []
    door_set = tr.env.door_set
    prev_pos: Dict[int, Pixel] = {}
    for t, rows in enumerate(tr.steps):
        born = 0
        active = 0
        for rid, i, j, role in rows:
            p = (i, j)
            if rid not in births:
                births[rid] = (t, p)
                travel[rid] = 0
                born += 1
                if p not in parent:
                    parent[p] = None
            elif p != prev_pos[rid]:
                travel[rid] += 1
                if p not in parent:
                    parent[p] = prev_pos[rid]
            final[rid] = p
            prev_pos[rid] = p
            if p in door_set and role != "stopped":
                active += 1
        emission.append(born)
        active_doors.append(active)

    depth_memo: Dict[Pixel, int] = {}

    def depth(p: Pixel) -> int:
        chain = []
        while p not in depth_memo:
            chain.append(p)
            q = parent[p]
            if q is None:
                depth_memo[p] = 0
                break
            p = q
        base = depth_memo[p]
        for q in reversed(chain):
            if q not in depth_memo:
                base += 1
                depth_memo[q] = base
        return depth_memo[chain[0]] if chain else depth_memo[p]

    tree_depth = max((depth(p) for p in parent), default=0)
    total = sum(travel.values())
    ratios = [
        Fraction(l1(births[rid][1], final[rid]), travel[rid])
        for rid in travel
        if travel[rid] > 0
    ]
    n = len(travel)
    return MetricsRecord(
        fill_time=tr.fill_time,
        halt_time=tr.halt_time,
        total_travel=total,
        max_travel=max(travel.values(), default=0),
        tree_depth=tree_depth,
        avg_travel=Fraction(total, n) if n else Fraction(0),
        avg_ratio=sum(ratios, Fraction(0)) / len(ratios) if ratios else Fraction(0),
        emission_series=emission,
        active_door_series=active_doors,
    )


def lower_bound(env: Environment) -> int:
    """Best of two makespan lower bounds no strategy can beat.

    Eccentricity: some pixel lies at BFS distance d from every door, and a
    robot needs d steps to get there.  Throughput: k doors emit at most k
    robots per step, and A - k pixels must be filled by robots that were
    not present at time 0.
    """
    ecc = max(bfs_distances(env, env.doors).values())
    k = len(env.doors)
    return max(ecc, math.ceil((env.area - k) / k))


def competitive_ratio(tr: Trace, env: Environment) -> Optional[Fraction]:
    """fill_time over the lower bound; None when the run never filled."""
    if tr.fill_time is None:
        return None
    return Fraction(tr.fill_time, max(lower_bound(env), 1))


def significant_events(active_door_series: List[int], k: int) -> List[Optional[int]]:
    """Latest timestep with at least ceil(k/2^i) doors active, per level i.

    Levels with equal thresholds are collapsed (once the threshold hits 1 it
    stays 1), so the list has one entry per distinct threshold, largest
    first.  A threshold the series never reaches reports None.
    """
    if k < 1:
        raise InvalidParameter("k must be positive")
    thresholds: List[int] = []
    i = 0
    while True:
        thr = math.ceil(k / 2**i)
        if not thresholds or thr != thresholds[-1]:
            thresholds.append(thr)
        if thr == 1:
            break
        i += 1
    out: List[Optional[int]] = []
    for thr in thresholds:
        hit = None
        for t, v in enumerate(active_door_series):
            if v >= thr:
                hit = t
        out.append(hit)
    return out


def count_splicings(tr: Trace) -> Dict[Pixel, int]:
    """How many splices each pixel initiated (the tip pixel of the graft)."""
    if tr.strategy != "lflf":
        raise InvalidParameter("splice counting only makes sense for lflf traces")
    counts: Dict[Pixel, int] = {}
    for s in tr.splices:
        counts[s.tip] = counts.get(s.tip, 0) + 1
    return counts


def connected(positions: Iterable[Pixel], doors: Set[Pixel], r_c: int) -> bool:
    """Is every component of the radius-r_c robot graph anchored to a door?"""
    pts = list(positions)
    if not pts:
        return True
    index = {p: n for n, p in enumerate(pts)}
    seen = [False] * len(pts)
    for start, p in enumerate(pts):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        component = []
        while stack:
            n = stack.pop()
            component.append(pts[n])
            cn = pts[n]
            for q, m in index.items():
                if not seen[m] and l1(cn, q) <= r_c:
                    seen[m] = True
                    stack.append(m)
        if not any(q in doors for q in component):
            return False
    return True


def trace_connected(tr: Trace, r_c: int = 3) -> bool:
    """The connectivity check above, at every recorded timestep."""
    doors = tr.env.door_set
    return all(
        connected([(i, j) for _, i, j, _ in rows], doors, r_c) for rows in tr.steps
    )


def state_census(env: Environment, strategy, max_steps: Optional[int] = None) -> Set[Tuple]:
    """Every distinct memory configuration any robot passes through.

    Only the fields the strategy's decision rule reads are counted (each
    strategy declares them); engine bookkeeping like in-flight deliveries
    does not distinguish automaton states the rule never branches on.  The
    census saturating to the same small set on every environment is what
    makes these robots finite automata rather than programs with counters.
    """
    from .kernel import World

    fields = strategy.state_fields
    world = World(env, strategy, record_history=False)
    seen: Set[Tuple] = set()
    limit = max_steps if max_steps is not None else 8 * env.area + 64
    while True:
        for r in world.robots.values():
            seen.add(tuple(getattr(r, f) for f in fields))
        if world.halted or world.t >= limit:
            return seen
        world.step()
