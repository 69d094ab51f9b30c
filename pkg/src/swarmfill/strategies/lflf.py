"""Dispersal along pixel-anchored flows.

Instead of robot-to-robot signalling, the swarm annotates the pixels it has
claimed: each flow is a chain of links from a door out to a growing tip
(pred pointing downstream, succ pointing back).  Robots simply ride the
links.  The robot at the tip extends the flow into unvisited pixels; when
it cannot, it grafts the tip into the left side of a passing flow, merging
the two streams and orphaning the target's old upstream (the engine wakes
a robot on the orphaned stub to wind it down); when it cannot do that
either, the tip pixel is retired for good and the flow shrinks by one.  A
flow that shrinks back into its door switches the door off; the swarm
halts when every door is off.
"""
from __future__ import annotations

from typing import Optional

from ..grid import DELTA, OPPOSITE, Direction, clockwise_sweep
from ..kernel import Action, LocalView, Role, StateUpdate, left_side


class FlowNetworkStrategy:
    name = "lflf"
    sensor_radius = 3
    comm_radius = 3
    uses_flow_links = True
    max_doors: Optional[int] = None
    # all navigation state lives on the pixels; a robot only knows its role
    state_fields = ("role",)

    def decide(self, view: LocalView) -> Action:
        me = view.me
        if not view.active((0, 0)):
            return Action()

        role = me.role
        if (
            role is Role.FOLLOWER
            and view.is_door((0, 0))
            and view.pred((0, 0)) is None
            and view.succ((0, 0)) is None
        ):
            role = Role.LEADER  # first robot out of a virgin door starts its flow

        d = view.pred((0, 0))
        if d is not None:
            # ride the flow downstream
            if not view.occupied(DELTA[d]):
                return Action(move=d)
            return Action()

        if role is not Role.LEADER:
            return Action()  # at a bare tip without the lead: hold still

        become = StateUpdate(role=Role.LEADER)
        incoming = view.succ((0, 0))
        sweep = clockwise_sweep(incoming if incoming is not None else Direction.SOUTH)

        for d in sweep:
            if view.frontier(DELTA[d]):
                return Action(
                    move=d, write_links=True, if_move=become, if_stay=become
                )

        for d in sweep:
            off = DELTA[d]
            if not (view.in_region(off) and view.visited(off) and view.active(off)):
                continue
            if view.is_door(off):
                continue
            v_succ, v_pred = view.succ(off), view.pred(off)
            if v_succ is None or v_pred is None:
                continue  # bare tips and malformed pixels are not graft targets
            if OPPOSITE[d] in left_side(v_succ, v_pred):
                return Action(splice=d, if_stay=become)

        return Action(retract=True, if_stay=become)
