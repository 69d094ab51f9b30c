"""Depth-first single-chain dispersal.

One leader walks the region depth-first, always advancing into unvisited
pixels; every other robot tails the robot ahead of it at two-pixel spacing.
Turns are announced backward along the chain: a robot that changes travel
direction when leaving a pixel tells the robot behind it which way to head
once it reaches that pixel.  A leader with nowhere left to go parks and
hands leadership backward; when the hand-off reaches a robot still on the
door with the region exhausted, the whole swarm halts.
"""
from __future__ import annotations

from typing import Optional

from ..grid import DELTA, OPPOSITE, PRIORITY, Direction, clockwise_sweep
from ..kernel import Action, LocalView, Message, MessageKind, OwnState, Role, StateUpdate


class DepthChainStrategy:
    name = "dflf"
    sensor_radius = 2
    comm_radius = 3
    uses_flow_links = False
    max_doors: Optional[int] = 1
    # the slice of a robot's memory this decision rule actually reads
    state_fields = ("role", "heading", "tailing", "pending")

    def decide(self, view: LocalView) -> Action:
        me = view.me
        if me.role is Role.LEADER:
            return self._lead(view, me, promote=False)

        heading = me.heading
        if me.tailing is None:
            locked = self._lock(view)
            if locked is not None:
                heading = locked
            elif not any(i.role is not Role.STOPPED for _, i in view.iter_robots()):
                # nobody to follow and nobody around: this flow starts with me
                return self._lead(view, me, promote=True)

        assert heading is not None
        off = DELTA[heading]
        if view.in_region(off) and not view.occupied(off):
            arrived = me.pending if me.pending is not None else heading
            msgs = ()
            if me.tailing is not None and heading != OPPOSITE[me.tailing]:
                # my travel direction changed: the robot behind must turn here too
                msgs = (Message(MessageKind.TURN, OPPOSITE[heading], payload=heading),)
            return Action(
                move=heading,
                if_move=StateUpdate(heading=arrived, tailing=OPPOSITE[heading], pending=None),
                if_stay=StateUpdate(heading=heading),
                msgs_move=msgs,
            )
        return Action(if_stay=StateUpdate(heading=heading))

    @staticmethod
    def _lock(view: LocalView) -> Optional[Direction]:
        """Fresh on the door: adopt the travel direction of the robot that just left."""
        for d in PRIORITY:
            nb = view.robot(DELTA[d])
            if nb is not None and nb.role is not Role.STOPPED and nb.tailing == OPPOSITE[d]:
                return d
        return None

    @staticmethod
    def _lead(view: LocalView, me: OwnState, promote: bool) -> Action:
        incoming = me.tailing if me.tailing is not None else Direction.SOUTH
        for d in clockwise_sweep(incoming):
            if view.frontier(DELTA[d]):
                msgs = ()
                if me.tailing is not None and d != OPPOSITE[me.tailing]:
                    msgs = (Message(MessageKind.TURN, OPPOSITE[d], payload=d),)
                return Action(
                    move=d,
                    if_move=StateUpdate(role=Role.LEADER, heading=None, tailing=OPPOSITE[d], pending=None),
                    if_stay=StateUpdate(role=Role.LEADER, heading=None),
                    msgs_move=msgs,
                )
        parked = StateUpdate(
            role=Role.STOPPED, heading=None, tailing=None, pending=None, waiting=False
        )
        if me.tailing is None:
            # still on the door with nothing left anywhere: the region is done
            return Action(halt=True, if_stay=parked)
        return Action(
            if_stay=parked,
            msgs_stay=(Message(MessageKind.PASS_LEAD, me.tailing),),
        )
