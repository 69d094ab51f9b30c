"""Exact optimal fill times on tiny environments, by exhaustive search.

Robots are interchangeable as far as filling goes, so a world state collapses
to the set of occupied pixels: doors are always in it, and a transition picks
any simultaneous set of moves onto pixels that were empty beforehand, then
refills vacated doors.  Breadth-first search over these configurations gives
the true optimum over every conceivable strategy, centralized or not, which
is what makes it a sound yardstick for lower bounds and competitive ratios.
"""
from __future__ import annotations

from collections import deque
from typing import Dict, FrozenSet, Iterator, List, Optional, Set, Tuple

from .grid import Environment, Pixel

SIZE_CAP = 12

Configuration = FrozenSet[Pixel]


class SizeCapExceeded(ValueError):
    """The environment is too large for exhaustive search."""


def _check_cap(env: Environment, cap: int) -> None:
    if env.area > cap:
        raise SizeCapExceeded(
            f"{env.area} pixels exceeds the search cap of {cap}; "
            "the configuration space doubles per pixel"
        )


def initial(env: Environment) -> Configuration:
    return frozenset(env.doors)


def successors(
    c: Configuration, env: Environment, cap: int = SIZE_CAP
) -> Set[Configuration]:
    """Every configuration reachable in one synchronous transition."""
    return {nxt for nxt, _ in _expand(c, env, cap)}


def _expand(
    c: Configuration, env: Environment, cap: int = SIZE_CAP
) -> Iterator[Tuple[Configuration, Tuple[Tuple[Pixel, Pixel], ...]]]:
    """Yield (successor, matching) pairs, where the matching lists the moves
    (source, target) that produce the successor.  Targets must have been
    unoccupied in c (the engine's delay rule) and pairwise distinct."""
    _check_cap(env, cap)
    occupied = sorted(c)
    doors = env.door_set
    empty = {p for p in env.free if p not in c}

    def options(p: Pixel) -> List[Pixel]:
        return [q for q in env.neighbors(p) if q in empty]

    moves: List[Tuple[Pixel, Pixel]] = []
    taken: Set[Pixel] = set()

    def rec(idx: int) -> Iterator[Tuple[Configuration, Tuple[Tuple[Pixel, Pixel], ...]]]:
        if idx == len(occupied):
            vacated = {src for src, _ in moves}
            landed = {dst for _, dst in moves}
            nxt = (c - vacated) | landed | doors
            yield frozenset(nxt), tuple(moves)
            return
        p = occupied[idx]
        yield from rec(idx + 1)  # p stays
        for q in options(p):
            if q in taken:
                continue
            moves.append((p, q))
            taken.add(q)
            yield from rec(idx + 1)
            taken.discard(q)
            moves.pop()

    seen: Set[Configuration] = set()
    for nxt, matching in rec(0):
        if nxt not in seen:
            seen.add(nxt)
            yield nxt, matching


def oracle_opt(env: Environment, cap: int = SIZE_CAP) -> int:
    """Length of the shortest transition sequence from doors-only to full."""
    opt, _ = oracle_opt_schedule(env, cap)
    return opt


def oracle_opt_schedule(
    env: Environment, cap: int = SIZE_CAP
) -> Tuple[int, List[Tuple[Tuple[Pixel, Pixel], ...]]]:
    """The optimum plus one witness schedule: per step, the moves made."""
    _check_cap(env, cap)
    full = frozenset(env.free)
    start = initial(env)
    if start == full:
        return 0, []
    parent: Dict[Configuration, Tuple[Configuration, Tuple[Tuple[Pixel, Pixel], ...]]] = {}
    dist = {start: 0}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        for nxt, matching in _expand(c, env, cap):
            if nxt in dist:
                continue
            dist[nxt] = dist[c] + 1
            parent[nxt] = (c, matching)
            if nxt == full:
                schedule = []
                cur: Configuration = full
                while cur != start:
                    cur, m = parent[cur]
                    schedule.append(m)
                schedule.reverse()
                return dist[full], schedule
            queue.append(nxt)
    raise RuntimeError("full occupancy unreachable; environment invariant broken")
