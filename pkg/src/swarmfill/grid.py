"""Pixel-grid environments: geometry, map parsing, and generators.

Coordinates are (i, j) with i growing eastward and j growing southward,
so row 0 of a map file is the northernmost row.  An environment is a
4-connected set of free pixels plus a non-empty ordered list of door
pixels through which robots enter.
"""
from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

Pixel = Tuple[int, int]


class Direction(IntEnum):
    """The four compass directions; enum order is the arbitration priority."""

    NORTH = 0
    SOUTH = 1
    EAST = 2
    WEST = 3


# (di, dj) per direction; j grows southward.
DELTA: Dict[Direction, Pixel] = {
    Direction.NORTH: (0, -1),
    Direction.SOUTH: (0, 1),
    Direction.EAST: (1, 0),
    Direction.WEST: (-1, 0),
}

OPPOSITE: Dict[Direction, Direction] = {
    Direction.NORTH: Direction.SOUTH,
    Direction.SOUTH: Direction.NORTH,
    Direction.EAST: Direction.WEST,
    Direction.WEST: Direction.EAST,
}

# Map clockwise order: N -> E -> S -> W.
CLOCKWISE: Dict[Direction, Direction] = {
    Direction.NORTH: Direction.EAST,
    Direction.EAST: Direction.SOUTH,
    Direction.SOUTH: Direction.WEST,
    Direction.WEST: Direction.NORTH,
}

# Fixed tie-break order used everywhere a set of directions must be ranked.
PRIORITY: Tuple[Direction, ...] = (
    Direction.NORTH,
    Direction.SOUTH,
    Direction.EAST,
    Direction.WEST,
)


def move(p: Pixel, d: Direction) -> Pixel:
    di, dj = DELTA[d]
    return (p[0] + di, p[1] + dj)


def direction_from(a: Pixel, b: Pixel) -> Direction:
    """Direction of the single step from pixel a to adjacent pixel b."""
    di, dj = b[0] - a[0], b[1] - a[1]
    for d, delta in DELTA.items():
        if delta == (di, dj):
            return d
    raise ValueError(f"pixels {a} and {b} are not 4-adjacent")


def l1(a: Pixel, b: Pixel) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def clockwise_sweep(start: Direction) -> Tuple[Direction, ...]:
    """The four directions in clockwise order beginning at start."""
    out = [start]
    for _ in range(3):
        out.append(CLOCKWISE[out[-1]])
    return tuple(out)


# ---------- errors ----------


class MapError(ValueError):
    """Base class for malformed map input."""


class NonRectangular(MapError):
    pass


class IllegalCharacter(MapError):
    pass


class NoDoor(MapError):
    pass


class Disconnected(MapError):
    pass


class InvalidParameter(MapError):
    pass


# ---------- environment ----------


@dataclass(frozen=True)
class Environment:
    """A connected free region with doors, inside a width x height bounding box."""

    width: int
    height: int
    free: FrozenSet[Pixel]
    doors: Tuple[Pixel, ...]

    @property
    def area(self) -> int:
        return len(self.free)

    @property
    def door_set(self) -> FrozenSet[Pixel]:
        return frozenset(self.doors)

    def in_bounds(self, p: Pixel) -> bool:
        return 0 <= p[0] < self.width and 0 <= p[1] < self.height

    def neighbors(self, p: Pixel) -> Iterator[Pixel]:
        """Free 4-neighbors of p, in the fixed N, S, E, W order."""
        for d in PRIORITY:
            q = move(p, d)
            if q in self.free:
                yield q


def _validate(width: int, height: int, free: Set[Pixel], doors: List[Pixel]) -> Environment:
    if not doors:
        raise NoDoor("environment has no door pixel")
    for p in doors:
        if p not in free:
            raise InvalidParameter(f"door {p} is not a free pixel")
    if len(set(doors)) != len(doors):
        raise InvalidParameter("duplicate door pixel")
    # connectivity of the free region
    seen: Set[Pixel] = set()
    queue = deque([next(iter(sorted(free)))])
    seen.add(queue[0])
    while queue:
        p = queue.popleft()
        for d in PRIORITY:
            q = move(p, d)
            if q in free and q not in seen:
                seen.add(q)
                queue.append(q)
    if seen != free:
        raise Disconnected(f"free region is not 4-connected ({len(free) - len(seen)} unreachable pixels)")
    return Environment(width, height, frozenset(free), tuple(doors))


def parse_map(text: str) -> Environment:
    """Parse an ASCII map: '#' obstacle, '.' free, 'D' door.  Row 0 is north."""
    rows = [line for line in text.splitlines() if line != ""]
    if not rows:
        raise NonRectangular("map has no rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise NonRectangular("map rows have unequal lengths")
    free: Set[Pixel] = set()
    doors: List[Pixel] = []
    for j, row in enumerate(rows):
        for i, ch in enumerate(row):
            if ch == "#":
                continue
            if ch == ".":
                free.add((i, j))
            elif ch == "D":
                free.add((i, j))
                doors.append((i, j))
            else:
                raise IllegalCharacter(f"illegal map character {ch!r} at {(i, j)}")
    return _validate(width, len(rows), free, doors)


def render_map(env: Environment) -> str:
    """Inverse of parse_map (modulo padding rows of obstacles)."""
    door_set = env.door_set
    lines = []
    for j in range(env.height):
        line = []
        for i in range(env.width):
            p = (i, j)
            if p in door_set:
                line.append("D")
            elif p in env.free:
                line.append(".")
            else:
                line.append("#")
        lines.append("".join(line))
    return "\n".join(lines)


def env_hash(env: Environment) -> str:
    digest = hashlib.sha256(render_map(env).encode()).hexdigest()
    return digest[:16]


# ---------- generators ----------


def gen_corridor(area: int) -> Environment:
    """A 1 x area corridor with the door at the west end."""
    if area < 1:
        raise InvalidParameter("corridor area must be >= 1")
    free = {(i, 0) for i in range(area)}
    return _validate(area, 1, free, [(0, 0)])


def gen_rect(width: int, height: int, doors: Iterable[Pixel]) -> Environment:
    """A full width x height rectangle with the given door pixels."""
    if width < 1 or height < 1:
        raise InvalidParameter("rectangle sides must be >= 1")
    free = {(i, j) for i in range(width) for j in range(height)}
    door_list = list(doors)
    for p in door_list:
        if p not in free:
            raise InvalidParameter(f"door {p} outside the {width}x{height} rectangle")
    return _validate(width, height, free, door_list)


def gen_square(n: int) -> Environment:
    """An n x n square with a single door in the northwest corner."""
    return gen_rect(n, n, [(0, 0)])


def _is_pow2(k: int) -> bool:
    return k >= 1 and (k & (k - 1)) == 0


def gen_hard_family(k: int, tooth: Optional[int] = None) -> Environment:
    """A door-halving obstacle course: k doors feed side-by-side chambers.

    Chamber i (width k/2**i, height L) is entered from chamber i-1 through
    a slot of height k/2**(i+1) at the top of the shared wall, so at each
    stage half of the surviving flows are squeezed off and die while the
    rest continue east.  Doors sit under chamber 0 along the south boundary.
    Total area is Theta(k * L); k must be a power of two.
    """
    if not _is_pow2(k):
        raise InvalidParameter("hard family requires k to be a power of two")
    if tooth is None:
        # deep enough that chamber depth, not corridor length, dominates
        tooth = max(8, 2 * k)
    length = int(tooth)
    if length < 4:
        raise InvalidParameter("tooth length must be >= 4")
    free: Set[Pixel] = set()
    doors: List[Pixel] = []
    x = 0
    width_i = k
    height = length
    while True:
        for i in range(x, x + width_i):
            for j in range(height):
                free.add((i, j))
        if width_i == 1:
            break
        # wall column with a slot of half the surviving width, at the top
        wall_x = x + width_i
        slot = max(width_i // 2, 1)
        for j in range(slot):
            free.add((wall_x, j))
        x = wall_x + 1
        width_i //= 2
    for i in range(k):
        doors.append((i, height - 1))
    total_w = max(p[0] for p in free) + 1
    return _validate(total_w, height, free, doors)


def gen_maze(width: int, height: int, area: int, doors: int, seed: int) -> Environment:
    """A random connected cave of the given area with `doors` door pixels.

    Deterministic for a fixed seed: the region is grown one random frontier
    cell at a time from a random start, and doors are sampled from the
    region (the start cell is always the first door).
    """
    import random

    if area < 1 or area > width * height:
        raise InvalidParameter("maze area out of range")
    if doors < 1 or doors > area:
        raise InvalidParameter("maze door count out of range")
    rng = random.Random(seed)
    start = (rng.randrange(width), rng.randrange(height))
    region: Set[Pixel] = {start}
    frontier: List[Pixel] = []

    def push_neighbors(p: Pixel) -> None:
        for d in PRIORITY:
            q = move(p, d)
            if 0 <= q[0] < width and 0 <= q[1] < height and q not in region:
                frontier.append(q)

    push_neighbors(start)
    while len(region) < area and frontier:
        q = frontier.pop(rng.randrange(len(frontier)))
        if q in region:
            continue
        region.add(q)
        push_neighbors(q)
    door_list = [start]
    rest = sorted(region - {start})
    while len(door_list) < doors:
        door_list.append(rest.pop(rng.randrange(len(rest))))
    return _validate(width, height, region, door_list)


# ---------- metrics helpers ----------


def bfs_distances(env: Environment, sources: Iterable[Pixel]) -> Dict[Pixel, int]:
    """Multi-source BFS distance from the nearest source to every free pixel."""
    dist: Dict[Pixel, int] = {}
    queue: deque = deque()
    for s in sources:
        if s not in env.free:
            raise InvalidParameter(f"BFS source {s} is not free")
        dist[s] = 0
        queue.append(s)
    while queue:
        p = queue.popleft()
        for q in env.neighbors(p):
            if q not in dist:
                dist[q] = dist[p] + 1
                queue.append(q)
    return dist
