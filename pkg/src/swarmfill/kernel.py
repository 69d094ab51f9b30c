"""Synchronous stepping engine for door-fed swarms of finite-state robots.

One step: every non-stopped robot reads its local neighborhood (state as of
time t), announces an action, and the engine commits everything at once.
A move may only target a pixel that was unoccupied at time t, so a pixel
freed during a step is re-enterable one step later.  Contested targets go
to the contender approaching from the highest-priority side (N, S, E, W).
Vacated doors are refilled with fresh robots before the step closes.

The engine also owns the shared infrastructure strategies build on:
short-range messages relayed down a trail, and per-pixel flow links (pred
toward the growing tip, succ back toward the feeding door) with atomic
graft and retract transactions.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .grid import (
    CLOCKWISE,
    DELTA,
    OPPOSITE,
    PRIORITY,
    Direction,
    Environment,
    Pixel,
    clockwise_sweep,
    direction_from,
    l1,
    move as shift,
)


class Role(Enum):
    LEADER = "leader"
    FOLLOWER = "follower"
    STOPPED = "stopped"


class MessageKind(Enum):
    TURN = "turn"          # travel-direction change, relayed to the robot behind
    TELL = "tell"          # branch assignment for the robot behind
    PASS_LEAD = "pass-lead"


@dataclass(frozen=True)
class Message:
    kind: MessageKind
    direction: Direction   # addressed to the pixel one step this way from the sender
    payload: Optional[Direction] = None


class _Keep:
    """Sentinel: leave the field as it is."""

    def __repr__(self) -> str:  # pragma: no cover
        return "KEEP"


KEEP = _Keep()


@dataclass(frozen=True)
class StateUpdate:
    """Partial robot-state overwrite; KEEP fields are untouched."""

    role: object = KEEP
    heading: object = KEEP
    tailing: object = KEEP
    pending: object = KEEP
    waiting: object = KEEP


@dataclass
class Action:
    """What a robot announces for the coming step.

    `if_move` applies only when the move commits (it can lose arbitration),
    `if_stay` otherwise.  Link writes, grafts and retracts are flow-strategy
    transactions; the engine validates them again at commit time.
    """

    move: Optional[Direction] = None
    if_move: Optional[StateUpdate] = None
    if_stay: Optional[StateUpdate] = None
    msgs_move: Tuple[Message, ...] = ()
    msgs_stay: Tuple[Message, ...] = ()
    write_links: bool = False          # on commit: pred(old) := dir, succ(new) := back
    splice: Optional[Direction] = None  # graft own tip into the flow one pixel this way
    retract: bool = False
    halt: bool = False


@dataclass
class Robot:
    """Full per-robot state.  The finite-automaton part is (role, heading,
    tailing, pending, waiting); the rest is bookkeeping the robot never reads."""

    rid: int
    pos: Pixel
    prev: Pixel
    origin: Pixel
    role: Role = Role.FOLLOWER
    heading: Optional[Direction] = Direction.NORTH
    tailing: Optional[Direction] = None
    pending: Optional[Direction] = None
    waiting: bool = False
    pending_at: Optional[Pixel] = None  # delivery metadata: where pending takes effect

    def automaton_state(self) -> Tuple:
        return (self.role, self.heading, self.tailing, self.pending, self.waiting)

    def role_label(self) -> str:
        if self.role is Role.STOPPED:
            return "stopped"
        if self.waiting:
            return "waiting"
        return self.role.value


@dataclass(frozen=True)
class NeighborInfo:
    """What a robot can sense about another robot."""

    role: Role
    heading: Optional[Direction]
    tailing: Optional[Direction]


@dataclass(frozen=True)
class OwnState:
    """A robot's own memory, as handed to its decision rule (no coordinates)."""

    role: Role
    heading: Optional[Direction]
    tailing: Optional[Direction]
    pending: Optional[Direction]
    waiting: bool


class LocalityViolation(RuntimeError):
    """A decision rule touched a pixel beyond its sensing radius."""


def left_side(succ_dir: Optional[Direction], pred_dir: Optional[Direction]) -> Tuple[Direction, ...]:
    """Approach sides of a flow pixel that count as its left.

    Both arguments are directions out of the pixel: toward its upstream
    neighbor and toward its downstream neighbor.  For a tip (no downstream)
    every side except the upstream one is left.  Otherwise the left sides
    are those strictly between upstream and downstream going clockwise.
    """
    if succ_dir is None:
        return ()
    if pred_dir is None:
        return tuple(d for d in PRIORITY if d != succ_dir)
    out: List[Direction] = []
    d = CLOCKWISE[succ_dir]
    while d != pred_dir:
        if d == succ_dir:
            return tuple(out)  # degenerate: upstream == downstream
        out.append(d)
        d = CLOCKWISE[d]
    return tuple(out)


class LocalView:
    """Lazy window onto the world, radius-checked at every access.

    Offsets are relative to the robot's own pixel.  In masked mode an
    out-of-range access returns seeded noise instead of raising, which lets
    tests prove decisions never depend on anything beyond the radius.
    """

    __slots__ = ("_world", "_robot", "radius", "_masked", "_window")

    def __init__(self, world: "World", robot: Robot, radius: int, masked: bool = False):
        self._world = world
        self._robot = robot
        self.radius = radius
        self._masked = masked
        self._window: Optional[List[Tuple[Pixel, NeighborInfo]]] = None

    # -- own state --

    @property
    def me(self) -> OwnState:
        r = self._robot
        return OwnState(r.role, r.heading, r.tailing, r.pending, r.waiting)

    # -- surroundings --

    def _abs(self, off: Pixel) -> Optional[Pixel]:
        if abs(off[0]) + abs(off[1]) > self.radius:
            if self._masked:
                return None
            raise LocalityViolation(
                f"robot {self._robot.rid} read offset {off} beyond radius {self.radius}"
            )
        return (self._robot.pos[0] + off[0], self._robot.pos[1] + off[1])

    def _noise(self, off: Pixel, tag: str) -> random.Random:
        w = self._world
        return random.Random(f"{w.mask_seed}:{w.t}:{self._robot.rid}:{off}:{tag}")

    def in_region(self, off: Pixel) -> bool:
        p = self._abs(off)
        if p is None:
            return self._noise(off, "region").random() < 0.5
        return p in self._world.env.free

    def is_door(self, off: Pixel) -> bool:
        p = self._abs(off)
        if p is None:
            return self._noise(off, "door").random() < 0.5
        return p in self._world.env.door_set

    def occupied(self, off: Pixel) -> bool:
        p = self._abs(off)
        if p is None:
            return self._noise(off, "occ").random() < 0.5
        return p in self._world.occupancy

    def visited(self, off: Pixel) -> bool:
        p = self._abs(off)
        if p is None:
            return self._noise(off, "vis").random() < 0.5
        return p in self._world.visited

    def frontier(self, off: Pixel) -> bool:
        """Unvisited free pixel (hence unoccupied)."""
        return self.in_region(off) and not self.visited(off)

    def active(self, off: Pixel) -> bool:
        p = self._abs(off)
        if p is None:
            return self._noise(off, "act").random() < 0.5
        return p in self._world.visited and p not in self._world.inactive

    def pred(self, off: Pixel) -> Optional[Direction]:
        p = self._abs(off)
        if p is None:
            rng = self._noise(off, "pred")
            return rng.choice([None, *PRIORITY])
        return self._world.pred.get(p)

    def succ(self, off: Pixel) -> Optional[Direction]:
        p = self._abs(off)
        if p is None:
            rng = self._noise(off, "succ")
            return rng.choice([None, *PRIORITY])
        return self._world.succ.get(p)

    def tree_parent(self, off: Pixel) -> Optional[Direction]:
        """Which way the visit tree's parent of that pixel lies; None at roots
        and unvisited pixels."""
        p = self._abs(off)
        if p is None:
            rng = self._noise(off, "parent")
            return rng.choice([None, *PRIORITY])
        par = self._world.tree_parent.get(p)
        if par is None:
            return None
        return direction_from(p, par)

    def robot(self, off: Pixel) -> Optional[NeighborInfo]:
        if off == (0, 0):
            return None
        p = self._abs(off)
        if p is None:
            rng = self._noise(off, "robot")
            if rng.random() < 0.5:
                return None
            return NeighborInfo(
                rng.choice(list(Role)), rng.choice([None, *PRIORITY]), rng.choice([None, *PRIORITY])
            )
        rid = self._world.occupancy.get(p)
        if rid is None:
            return None
        r = self._world.robots[rid]
        return NeighborInfo(r.role, r.heading, r.tailing)

    def iter_robots(self) -> Iterable[Tuple[Pixel, NeighborInfo]]:
        """All other robots in the sensing diamond, nearest-first scan order.

        The scan never leaves the window, so the result is cached: repeat
        calls within one decision are free and see the same time-t world.
        """
        if self._window is None:
            rad = self.radius
            ci, cj = self._robot.pos
            occ = self._world.occupancy
            robots = self._world.robots
            out: List[Tuple[Pixel, NeighborInfo]] = []
            for dj in range(-rad, rad + 1):
                for di in range(-(rad - abs(dj)), rad - abs(dj) + 1):
                    if di == 0 and dj == 0:
                        continue
                    rid = occ.get((ci + di, cj + dj))
                    if rid is not None:
                        r = robots[rid]
                        out.append(((di, dj), NeighborInfo(r.role, r.heading, r.tailing)))
            self._window = out
        return self._window


# ---------- the world ----------


FRESH_HEADING = Direction.NORTH


@dataclass
class SpliceEvent:
    t: int
    tip: Pixel
    target: Pixel
    cut: Optional[Pixel]


class World:
    """Environment, robot population, flow links, and the step machinery."""

    def __init__(
        self,
        env: Environment,
        strategy,
        record_history: bool = True,
        masked: bool = False,
        mask_seed: int = 0,
        validate: bool = False,
    ):
        self.env = env
        self.strategy = strategy
        self.record_history = record_history
        self.masked = masked
        self.mask_seed = mask_seed
        self.validate = validate
        self.pending_revalidate = bool(getattr(strategy, "pending_revalidate", False))

        self.t = 0
        self.robots: Dict[int, Robot] = {}
        self.occupancy: Dict[Pixel, int] = {}
        self.visited: Set[Pixel] = set(env.doors)
        self.inactive: Set[Pixel] = set()
        self.pred: Dict[Pixel, Direction] = {}
        self.succ: Dict[Pixel, Direction] = {}
        self.tree_parent: Dict[Pixel, Optional[Pixel]] = {p: None for p in env.doors}
        self.move_count: Dict[int, int] = {}
        self.pred_robot: Dict[int, int] = {}

        self.fill_time: Optional[int] = None
        self.halt_time: Optional[int] = None
        self.halted = False
        self.timed_out = False

        self.history: List[List[Tuple[int, int, int, str]]] = []
        self.population_series: List[int] = []
        self.active_door_series: List[int] = []
        self.warnings: List[str] = []
        self.audit_notes: List[str] = []  # step auditor observations, never fatal
        self.splice_events: List[SpliceEvent] = []
        self.splice_into: Dict[Pixel, int] = {}

        self._next_rid = 0
        for door in env.doors:
            # the first robot out of each door starts as that flow's leader;
            # every later materialization is a follower
            self._materialize(door).role = Role.LEADER
        self._close_step()

    # -- setup / bookkeeping --

    def _materialize(self, door: Pixel) -> Robot:
        r = Robot(rid=self._next_rid, pos=door, prev=door, origin=door, heading=FRESH_HEADING)
        self._next_rid += 1
        self.robots[r.rid] = r
        self.occupancy[door] = r.rid
        self.move_count[r.rid] = 0
        return r

    def _active_doors(self) -> int:
        n = 0
        for door in self.env.doors:
            rid = self.occupancy.get(door)
            if door in self.inactive:
                continue
            if rid is not None and self.robots[rid].role is Role.STOPPED:
                continue
            n += 1
        return n

    def snapshot(self) -> List[Tuple[int, int, int, str]]:
        return [
            (r.rid, r.pos[0], r.pos[1], r.role_label())
            for r in (self.robots[k] for k in sorted(self.robots))
        ]

    def _close_step(self) -> None:
        if self.record_history:
            self.history.append(self.snapshot())
        self.population_series.append(len(self.robots))
        self.active_door_series.append(self._active_doors())
        if self.fill_time is None and len(self.occupancy) == self.env.area:
            self.fill_time = self.t
        if self.validate:
            from . import verify

            verify.check_step(self)

    def warn(self, text: str) -> None:
        self.warnings.append(f"t={self.t} {text}")

    # -- the step --

    def step(self) -> None:
        if self.halted:
            raise RuntimeError("world already halted")
        env = self.env
        decisions: List[Tuple[Robot, Action]] = []
        for rid in sorted(self.robots):
            r = self.robots[rid]
            if r.role is Role.STOPPED:
                continue
            view = LocalView(self, r, self.strategy.sensor_radius, masked=self.masked)
            decisions.append((r, self.strategy.decide(view)))

        # neutralize ill-formed moves: off-region or occupied-at-t targets
        movers: List[Tuple[Robot, Action, Pixel]] = []
        stayers: List[Tuple[Robot, Action]] = []
        for r, act in decisions:
            if act.move is None:
                stayers.append((r, act))
                continue
            target = shift(r.pos, act.move)
            if target not in env.free:
                self.warn(f"robot {r.rid} intent into non-free pixel {target}; neutralized")
                stayers.append((r, act))
            elif target in self.occupancy:
                self.warn(f"robot {r.rid} intent into occupied pixel {target}; neutralized")
                stayers.append((r, act))
            else:
                movers.append((r, act, target))

        # arbitration: highest-priority approach side wins a contested pixel
        by_target: Dict[Pixel, List[Tuple[Robot, Action]]] = {}
        for r, act, target in movers:
            by_target.setdefault(target, []).append((r, act))
        committed: List[Tuple[Robot, Action, Pixel]] = []
        for target, group in by_target.items():
            if len(group) > 1:
                group.sort(key=lambda ra: direction_from(target, ra[0].pos))
            winner, wact = group[0]
            committed.append((winner, wact, target))
            for loser, lact in group[1:]:
                stayers.append((loser, lact))

        messages: List[Tuple[Robot, Message]] = []
        arrivals: List[Robot] = []

        for r, act, target in committed:
            move_dir = act.move
            assert move_dir is not None
            old = r.pos
            del self.occupancy[old]
            self.occupancy[target] = r.rid
            r.prev, r.pos = old, target
            self.move_count[r.rid] += 1
            if target not in self.visited:
                self.visited.add(target)
                self.tree_parent[target] = old
            if act.write_links:
                self.pred[old] = move_dir
                self.succ[target] = OPPOSITE[move_dir]
            self._apply(r, act.if_move)
            if r.pending is not None and r.pending_at == target:
                arrivals.append(r)
            messages.extend((r, m) for m in act.msgs_move)

        # assignments ripen only after every move of the step has landed, so
        # they can be checked against the final visited set
        for r in arrivals:
            tgt = shift(r.pos, r.pending)
            if not self.pending_revalidate:
                r.heading = r.pending
            elif tgt not in self.visited:
                # an unclaimed frontier; a visible claim wins over the relay
                if not self._claim_on(tgt, r):
                    r.heading = r.pending
            elif self.tree_parent.get(tgt) == r.pos:
                r.heading = r.pending
            r.pending = None
            r.pending_at = None

        halt_pending = False
        splice_ops: List[Tuple[Robot, Direction]] = []
        retract_ops: List[Robot] = []
        for r, act in stayers:
            self._apply(r, act.if_stay)
            messages.extend((r, m) for m in act.msgs_stay)
            if act.halt:
                halt_pending = True
            if act.splice is not None:
                splice_ops.append((r, act.splice))
            if act.retract:
                retract_ops.append(r)

        # vacated doors emit fresh robots
        for door in env.doors:
            if door not in self.occupancy:
                self._materialize(door)

        # flow grafts, then retractions, each re-checked against current links
        spliced_targets: Set[Pixel] = set()
        for r, d in sorted(splice_ops, key=lambda rd: rd[0].rid):
            if not self._commit_splice(r, d, spliced_targets):
                retract_ops.append(r)  # dead graft: retire the tip instead
        for r in sorted(retract_ops, key=lambda r: r.rid):
            self._commit_retract(r, spliced_targets)
        if self.inactive and all(d in self.inactive for d in env.doors):
            halt_pending = True

        self._deliver(messages)

        self.t += 1
        if halt_pending:
            self.halted = True
            self.halt_time = self.t
        self._close_step()

    def run(self, max_steps: Optional[int] = None) -> None:
        if max_steps is None:
            max_steps = 8 * self.env.area + 64
        while not self.halted and self.t < max_steps:
            self.step()
        if not self.halted:
            self.timed_out = True

    # -- commit helpers --

    def _claim_on(self, tgt: Pixel, exclude: Robot) -> bool:
        """True if a live robot's heading points at tgt (from next door)."""
        for o in self.robots.values():
            if o is exclude or o.role is Role.STOPPED or o.heading is None:
                continue
            if shift(o.pos, o.heading) == tgt:
                return True
        return False

    @staticmethod
    def _apply(r: Robot, upd: Optional[StateUpdate]) -> None:
        if upd is None:
            return
        if not isinstance(upd.role, _Keep):
            r.role = upd.role
        if not isinstance(upd.heading, _Keep):
            r.heading = upd.heading
        if not isinstance(upd.tailing, _Keep):
            r.tailing = upd.tailing
        if not isinstance(upd.pending, _Keep):
            r.pending = upd.pending
            if upd.pending is None:
                r.pending_at = None
        if not isinstance(upd.waiting, _Keep):
            r.waiting = upd.waiting

    def _commit_splice(self, r: Robot, d: Direction, spliced_targets: Set[Pixel]) -> bool:
        """Graft the flow tip at r's pixel into the flow at the next pixel over.

        Returns False when the graft is stale or would bend the flow into a
        cycle; the caller then retires the tip instead.
        """
        u = r.pos
        v = shift(u, d)
        if r.role is not Role.LEADER or self.pred.get(u) is not None:
            self.warn(f"stale graft from {u}: initiator no longer a flow tip")
            return False
        ok = (
            v in self.visited
            and v not in self.inactive
            and v not in self.env.door_set
            and self.pred.get(v) is not None
            and self.succ.get(v) is not None
            and OPPOSITE[d] in left_side(self.succ.get(v), self.pred.get(v))
        )
        if not ok:
            self.warn(f"stale graft from {u} into {v}; retiring tip")
            return False
        # cycle guard: u must not sit downstream of v already
        x, steps = v, 0
        while x is not None and steps <= self.env.area + 1:
            pd = self.pred.get(x)
            x = shift(x, pd) if pd is not None else None
            steps += 1
            if x == u:
                self.warn(f"graft from {u} into {v} would close a cycle; retiring tip")
                return False
        cut = shift(v, self.succ[v])
        if self.pred.get(cut) == direction_from(cut, v):
            del self.pred[cut]
        self.succ[v] = OPPOSITE[d]
        self.pred[u] = d
        r.role = Role.FOLLOWER
        spliced_targets.add(v)
        self.splice_into[v] = self.splice_into.get(v, 0) + 1
        self.splice_events.append(SpliceEvent(self.t, u, v, cut))
        self._promote_upstream(cut)
        return True

    def _commit_retract(self, r: Robot, spliced_targets: Set[Pixel]) -> bool:
        u = r.pos
        if r.role is not Role.LEADER or self.pred.get(u) is not None:
            self.warn(f"stale retract at {u}; skipped")
            return False
        if u in spliced_targets:
            self.warn(f"retract at {u} blocked by fresh graft; skipped")
            return False
        if u in self.inactive:
            return False
        self.inactive.add(u)
        r.role = Role.STOPPED
        r.heading = r.tailing = r.pending = None
        r.waiting = False
        s = self.succ.get(u)
        if s is None:
            return True  # a door went dark; caller checks for full shutdown
        w = shift(u, s)
        if self.pred.get(w) == direction_from(w, u):
            del self.pred[w]
        self._promote_upstream(w)
        return True

    def _promote_upstream(self, start: Pixel) -> None:
        """Wake the first robot at or behind the new tip so the flow keeps a leader."""
        x = start
        steps = 0
        while steps <= self.env.area + 1:
            rid = self.occupancy.get(x)
            if rid is not None and self.robots[rid].role is not Role.STOPPED:
                self.robots[rid].role = Role.LEADER
                return
            s = self.succ.get(x)
            if s is None:
                return
            x = shift(x, s)
            steps += 1

    def _deliver(self, messages: List[Tuple[Robot, Message]]) -> None:
        """Route each message to the pixel next to its (post-move) sender.

        The occupant of the addressed pixel receives it; failing that, the
        nearest robot currently heading into that pixel; otherwise it drops.
        """
        relay = getattr(self.strategy, "tell_relay", False)
        for sender, msg in messages:
            target = shift(sender.pos, msg.direction)
            recipient: Optional[Robot] = None
            at_target = False
            rid = self.occupancy.get(target)
            if rid is not None and self.robots[rid].role is not Role.STOPPED and rid != sender.rid:
                recipient = self.robots[rid]
                at_target = True
            else:
                best: Optional[Tuple[int, int]] = None
                for orid in self.robots:
                    o = self.robots[orid]
                    if o.role is Role.STOPPED or o.heading is None or orid == sender.rid:
                        continue
                    if shift(o.pos, o.heading) == target:
                        key = (l1(o.pos, target), orid)
                        if best is None or key < best:
                            best = key
                            recipient = o
                if recipient is None and relay:
                    # chain addressing: the follower may trail up to 3 behind
                    for orid in self.robots:
                        o = self.robots[orid]
                        if o.role is Role.STOPPED or orid == sender.rid:
                            continue
                        key = (l1(o.pos, target), orid)
                        if key[0] <= 3 and (best is None or key < best):
                            best = key
                            recipient = o
            if recipient is None:
                self.warn(f"message {msg.kind.value} from robot {sender.rid} dropped")
                continue
            if msg.kind is MessageKind.PASS_LEAD:
                recipient.role = Role.LEADER
                recipient.heading = None
                self.pred_robot.pop(recipient.rid, None)
            else:
                # guidance for the addressed pixel: whoever already stands there
                # takes it now, anyone else takes it on reaching that pixel
                if at_target:
                    recipient.heading = msg.payload
                else:
                    recipient.pending = msg.payload
                    recipient.pending_at = target
                self.pred_robot[recipient.rid] = sender.rid
